//! Polynomial-structure algebra: metallic structures, almost product
//! conversions, almost quadratic φ-structures, spectral decomposition, and
//! the associated-metric construction, together with their verifier suites.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::report::{ResidualStat, VerificationReport};
use crate::sample::Sampling;
use crate::tensor::{
    covariant_derivative_11, mat_max_abs, nijenhuis, vec_norm, ChartedManifold, OneForm,
    TensorField11, VectorField,
};

/// Relative singular-value threshold for the rank-(dim−1) check.
const RANK_THRESHOLD: f64 = 1e-8;

/// Which of the two structures induced by a conversion formula to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// The positive root σ of x² − px − q = 0.
pub fn metallic_number(p: u32, q: u32) -> Result<f64> {
    if p < 1 || q < 1 {
        return Err(Error::InvalidParameters(format!(
            "metallic numbers need p, q >= 1 (got p = {p}, q = {q})"
        )));
    }
    let (p, q) = (p as f64, q as f64);
    Ok((p + (p * p + 4.0 * q).sqrt()) / 2.0)
}

/// A (1,1) tensor field J with J² = pJ + qI, carried together with the two
/// roots σ, σ̄ of x² − px − q.
#[derive(Debug, Clone)]
pub struct MetallicStructure {
    pub p: u32,
    pub q: u32,
    pub field: TensorField11,
    pub sigma: f64,
    pub sigma_bar: f64,
}

impl MetallicStructure {
    pub fn new(p: u32, q: u32, field: TensorField11) -> Result<MetallicStructure> {
        let sigma = metallic_number(p, q)?;
        let sigma_bar = p as f64 - sigma;
        Ok(MetallicStructure {
            p,
            q,
            field,
            sigma,
            sigma_bar,
        })
    }

    /// Constant diagonal structure with the first `n_sigma` entries σ and the
    /// rest σ̄.
    pub fn diagonal(p: u32, q: u32, dim: usize, n_sigma: usize) -> Result<MetallicStructure> {
        let sigma = metallic_number(p, q)?;
        let sigma_bar = p as f64 - sigma;
        let values: Vec<f64> = (0..dim)
            .map(|i| if i < n_sigma { sigma } else { sigma_bar })
            .collect();
        let matrix = DMatrix::from_diagonal(&DVector::from_vec(values));
        MetallicStructure::new(p, q, TensorField11::constant(&matrix))
    }

    /// Constant σ·I structure (every direction dilated by σ).
    pub fn scalar(p: u32, q: u32, dim: usize) -> Result<MetallicStructure> {
        MetallicStructure::diagonal(p, q, dim, dim)
    }
}

/// A (1,1) tensor field F with F² = I.
#[derive(Debug, Clone)]
pub struct AlmostProductStructure {
    pub field: TensorField11,
}

/// F± = ±(2/(2σ−p)) J ∓ (p/(2σ−p)) I.
pub fn product_from_metallic(s: &MetallicStructure, sign: Sign) -> AlmostProductStructure {
    let denom = 2.0 * s.sigma - s.p as f64; // = sqrt(p² + 4q) > 0
    let a = sign.factor() * 2.0 / denom;
    let b = -sign.factor() * s.p as f64 / denom;
    AlmostProductStructure {
        field: s.field.affine(a, b),
    }
}

/// J± = ±((2σ−p)/2) F + (p/2) I.
pub fn metallic_from_product(
    f: &AlmostProductStructure,
    p: u32,
    q: u32,
    sign: Sign,
) -> Result<MetallicStructure> {
    let sigma = metallic_number(p, q)?;
    let a = sign.factor() * (2.0 * sigma - p as f64) / 2.0;
    let b = p as f64 / 2.0;
    MetallicStructure::new(p, q, f.field.affine(a, b))
}

fn eta_outer_xi(xi: &[f64], eta: &[f64]) -> DMatrix<f64> {
    let dim = xi.len();
    DMatrix::from_fn(dim, dim, |i, j| xi[i] * eta[j])
}

/// Residuals of the defining identities of a metallic Riemannian structure:
/// J² − pJ − qI, self-adjointness of J, the derived metric relation, and the
/// pointwise spectrum.
pub fn verify_metallic(
    chart: &ChartedManifold,
    s: &MetallicStructure,
    sampling: &Sampling,
) -> Result<VerificationReport> {
    let (p, q) = (s.p as f64, s.q as f64);
    let dim = chart.dim();
    let mut poly = ResidualStat::new("metallic.polynomial", sampling.tol);
    let mut self_adj = ResidualStat::new("metallic.self_adjoint", sampling.tol);
    let mut metric_rel = ResidualStat::new("metallic.metric_relation", sampling.tol);
    let mut spectrum = ResidualStat::new("metallic.eigenvalues", 1e-8);

    for point in chart.sample_points(sampling.count, sampling.seed) {
        let j = s.field.value_at(chart, &point)?;
        let g = chart.metric_at(&point)?;
        let jt = j.transpose();

        let r1 = &j * &j - p * &j - q * DMatrix::identity(dim, dim);
        poly.record(&point, mat_max_abs(&r1));

        let r2 = &jt * &g - &g * &j;
        self_adj.record(&point, mat_max_abs(&r2));

        let r3 = &jt * &g * &j - p * (&jt * &g) - q * &g;
        metric_rel.record(&point, mat_max_abs(&r3));

        let eig_res = j
            .complex_eigenvalues()
            .iter()
            .map(|l| {
                let to_sigma = (l - nalgebra::Complex::new(s.sigma, 0.0)).norm();
                let to_bar = (l - nalgebra::Complex::new(s.sigma_bar, 0.0)).norm();
                to_sigma.min(to_bar)
            })
            .fold(0.0_f64, f64::max);
        spectrum.record(&point, eig_res);
    }

    if poly.max() <= sampling.tol && self_adj.max() <= sampling.tol {
        metric_rel.note("implied by the polynomial and self-adjointness identities");
    }
    Ok(VerificationReport::new(vec![
        poly.finish(),
        self_adj.finish(),
        metric_rel.finish(),
        spectrum.finish(),
    ]))
}

/// Max |N_J(∂_i, ∂_j)| over coordinate pairs and samples.
pub fn verify_integrable(
    chart: &ChartedManifold,
    s: &MetallicStructure,
    sampling: &Sampling,
) -> Result<VerificationReport> {
    let dim = chart.dim();
    let mut stat = ResidualStat::new("integrable.nijenhuis", sampling.tol);
    for point in chart.sample_points(sampling.count, sampling.seed) {
        for i in 0..dim {
            for j in (i + 1)..dim {
                let n = nijenhuis(
                    chart,
                    &s.field,
                    &VectorField::coordinate(dim, i),
                    &VectorField::coordinate(dim, j),
                    &point,
                )?;
                stat.record(&point, vec_norm(&n));
            }
        }
    }
    Ok(VerificationReport::new(vec![stat.finish()]))
}

/// Max |(∇_X J)Y| over coordinate pairs and samples, plus the Nijenhuis
/// check: a parallel J must also be integrable.
pub fn verify_locally_metallic(
    chart: &ChartedManifold,
    s: &MetallicStructure,
    sampling: &Sampling,
) -> Result<VerificationReport> {
    let dim = chart.dim();
    let mut nabla = ResidualStat::new("locally_metallic.nabla_j", sampling.tol);
    for point in chart.sample_points(sampling.count, sampling.seed) {
        for i in 0..dim {
            for j in 0..dim {
                let e_i: Vec<f64> = (0..dim).map(|k| (k == i) as u8 as f64).collect();
                let e_j: Vec<f64> = (0..dim).map(|k| (k == j) as u8 as f64).collect();
                let v = covariant_derivative_11(chart, &s.field, &e_i, &e_j, &point)?;
                nabla.record(&point, vec_norm(&v));
            }
        }
    }
    let nabla_max = nabla.max();
    let mut integrable = verify_integrable(chart, s, sampling)?;
    for check in &mut integrable.checks {
        check.name = check.name.replace("integrable.", "locally_metallic.");
    }
    let n_max = integrable.max_residual("locally_metallic.nijenhuis");

    let mut implication = ResidualStat::new("locally_metallic.implies_integrable", sampling.tol);
    if nabla_max <= sampling.tol {
        implication.record(&[], n_max);
        implication.note("parallel J, so the torsion residual must vanish too");
    } else {
        implication.record(&[], 0.0);
        implication.note(format!(
            "vacuous: nabla J residual {nabla_max:.3e} exceeds tol"
        ));
    }

    let mut checks = vec![nabla.finish()];
    checks.extend(integrable.checks);
    checks.push(implication.finish());
    Ok(VerificationReport::new(checks))
}

/// The data (φ, η, ξ) with φ² = aφ + b(I − η⊗ξ), b ≠ 0, a² + 4b ≠ 0.
#[derive(Debug, Clone)]
pub struct QuadraticPhiStructure {
    pub a: f64,
    pub b: f64,
    pub phi: TensorField11,
    pub eta: OneForm,
    pub xi: VectorField,
}

impl QuadraticPhiStructure {
    pub fn new(
        a: f64,
        b: f64,
        phi: TensorField11,
        eta: OneForm,
        xi: VectorField,
    ) -> Result<QuadraticPhiStructure> {
        if b == 0.0 {
            return Err(Error::InvalidParameters("b must be nonzero".into()));
        }
        if a * a + 4.0 * b == 0.0 {
            return Err(Error::InvalidParameters(format!(
                "a^2 + 4b must be nonzero (a = {a}, b = {b})"
            )));
        }
        Ok(QuadraticPhiStructure {
            a,
            b,
            phi,
            eta,
            xi,
        })
    }

    /// Eigenvalues of φ away from ξ: the roots of x² − ax − b.
    pub fn lambda(&self) -> Result<(f64, f64)> {
        let disc = self.a * self.a + 4.0 * self.b;
        if disc < 0.0 {
            return Err(Error::ComplexSpectrum { discriminant: disc });
        }
        let root = disc.sqrt();
        Ok(((self.a + root) / 2.0, (self.a - root) / 2.0))
    }

    pub fn values_at(
        &self,
        chart: &ChartedManifold,
        point: &[f64],
    ) -> Result<(DMatrix<f64>, Vec<f64>, Vec<f64>)> {
        Ok((
            self.phi.value_at(chart, point)?,
            self.eta.value_at(chart, point)?,
            self.xi.value_at(chart, point)?,
        ))
    }
}

/// Structural residuals of an almost quadratic φ-structure, plus the metric
/// compatibility identities when `with_metric` is set.
pub fn verify_quadratic_phi(
    chart: &ChartedManifold,
    s: &QuadraticPhiStructure,
    sampling: &Sampling,
    with_metric: bool,
) -> Result<VerificationReport> {
    if s.b == 0.0 || s.a * s.a + 4.0 * s.b == 0.0 {
        return Err(Error::InvalidParameters(
            "quadratic structure needs b != 0 and a^2 + 4b != 0".into(),
        ));
    }
    let dim = chart.dim();
    let (a, b) = (s.a, s.b);
    let mut quad = ResidualStat::new("quadratic_phi.quadratic", sampling.tol);
    let mut phi_xi = ResidualStat::new("quadratic_phi.phi_xi", sampling.tol);
    let mut eta_xi = ResidualStat::new("quadratic_phi.eta_xi", sampling.tol);
    let mut eta_phi = ResidualStat::new("quadratic_phi.eta_phi", sampling.tol);
    let mut rank = ResidualStat::new("quadratic_phi.rank", RANK_THRESHOLD);
    let mut rank_ok = true;
    let mut compat = ResidualStat::new("quadratic_phi.self_adjoint", sampling.tol);
    let mut metric_rel = ResidualStat::new("quadratic_phi.metric_relation", sampling.tol);

    for point in chart.sample_points(sampling.count, sampling.seed) {
        let (phi, eta, xi) = s.values_at(chart, &point)?;

        let r = &phi * &phi
            - a * &phi
            - b * (DMatrix::identity(dim, dim) - eta_outer_xi(&xi, &eta));
        quad.record(&point, mat_max_abs(&r));

        let pxi = &phi * DVector::from_column_slice(&xi);
        phi_xi.record(&point, pxi.norm());

        let exi: f64 = eta.iter().zip(&xi).map(|(e, x)| e * x).sum();
        eta_xi.record(&point, (exi - 1.0).abs());

        let ephi = DVector::from_column_slice(&eta).transpose() * &phi;
        eta_phi.record(&point, ephi.iter().fold(0.0_f64, |m, v| m.max(v.abs())));

        let svd = phi.clone().svd(false, false);
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let top = sv[0].max(f64::MIN_POSITIVE);
        let smallest_rel = sv[dim - 1] / top;
        rank.record(&point, smallest_rel);
        if dim >= 2 && sv[dim - 2] / top <= RANK_THRESHOLD {
            rank_ok = false;
        }

        if with_metric {
            let g = chart.metric_at(&point)?;
            let pt = phi.transpose();
            compat.record(&point, mat_max_abs(&(&pt * &g - &g * &phi)));
            let eta_eta = DMatrix::from_fn(dim, dim, |i, j| eta[i] * eta[j]);
            let r = &pt * &g * &phi - a * (&pt * &g) - b * (&g - eta_eta);
            metric_rel.record(&point, mat_max_abs(&r));
        }
    }

    if !rank_ok {
        rank.note("rank fell below dim - 1 at some sample");
    }
    let rank_pass = rank_ok && rank.max() <= RANK_THRESHOLD;
    let mut checks = vec![
        quad.finish(),
        phi_xi.finish(),
        eta_xi.finish(),
        eta_phi.finish(),
        rank.finish_with(rank_pass),
    ];
    if with_metric {
        checks.push(compat.finish());
        checks.push(metric_rel.finish());
    }
    Ok(VerificationReport::new(checks))
}

/// Projectors onto the three eigendistributions of φ at a point.
#[derive(Debug, Clone)]
pub struct SpectralProjectors {
    pub p_plus: DMatrix<f64>,
    pub p_minus: DMatrix<f64>,
    pub p_zero: DMatrix<f64>,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

/// Lagrange matrix-polynomial projectors of φ at the eigenvalues λ₊, λ₋, 0.
///
/// φ(φ − λ₊)(φ − λ₋) = 0 follows from the quadratic identity and η∘φ = 0, so
/// for a real spectrum (a² + 4b > 0) the three interpolation polynomials give
/// exact idempotents; P₀ is the explicit rank-one piece ξ⊗η.
pub fn spectral_projectors(
    chart: &ChartedManifold,
    s: &QuadraticPhiStructure,
    point: &[f64],
) -> Result<SpectralProjectors> {
    let disc = s.a * s.a + 4.0 * s.b;
    if disc < 0.0 {
        return Err(Error::ComplexSpectrum { discriminant: disc });
    }
    let (lp, lm) = s.lambda()?;
    let dim = chart.dim();
    let (phi, eta, xi) = s.values_at(chart, point)?;
    let id = DMatrix::identity(dim, dim);
    let p_plus = &phi * (&phi - lm * &id) / (lp * (lp - lm));
    let p_minus = &phi * (&phi - lp * &id) / (lm * (lm - lp));
    let p_zero = eta_outer_xi(&xi, &eta);
    Ok(SpectralProjectors {
        p_plus,
        p_minus,
        p_zero,
        lambda_plus: lp,
        lambda_minus: lm,
    })
}

/// Verifier for the spectral decomposition: idempotence, mutual
/// annihilation, completeness, the eigen-relations, and integer traces that
/// stay constant across samples.
pub fn verify_spectral(
    chart: &ChartedManifold,
    s: &QuadraticPhiStructure,
    sampling: &Sampling,
) -> Result<VerificationReport> {
    let dim = chart.dim();
    let tol = sampling.tol.max(1e-10);
    let mut idem = ResidualStat::new("spectral.idempotent", tol);
    let mut ortho = ResidualStat::new("spectral.orthogonal", tol);
    let mut complete = ResidualStat::new("spectral.completeness", tol);
    let mut eigrel = ResidualStat::new("spectral.eigen_relation", tol);
    let mut traces = ResidualStat::new("spectral.trace_integrality", 1e-8);
    let mut trace_triples: Vec<(i64, i64, i64)> = Vec::new();

    for point in chart.sample_points(sampling.count, sampling.seed) {
        let proj = spectral_projectors(chart, s, &point)?;
        let phi = s.phi.value_at(chart, &point)?;
        let parts = [&proj.p_plus, &proj.p_minus, &proj.p_zero];
        for p in parts {
            idem.record(&point, mat_max_abs(&(p * p - p)));
        }
        for (i, p) in parts.iter().enumerate() {
            for (j, q) in parts.iter().enumerate() {
                if i != j {
                    ortho.record(&point, mat_max_abs(&(*p * *q)));
                }
            }
        }
        let sum = &proj.p_plus + &proj.p_minus + &proj.p_zero;
        complete.record(&point, mat_max_abs(&(sum - DMatrix::identity(dim, dim))));
        eigrel.record(
            &point,
            mat_max_abs(&(&phi * &proj.p_plus - proj.lambda_plus * &proj.p_plus)),
        );
        eigrel.record(
            &point,
            mat_max_abs(&(&phi * &proj.p_minus - proj.lambda_minus * &proj.p_minus)),
        );
        eigrel.record(&point, mat_max_abs(&(&phi * &proj.p_zero)));

        let t = [
            proj.p_plus.trace(),
            proj.p_minus.trace(),
            proj.p_zero.trace(),
        ];
        let rounded = (
            t[0].round() as i64,
            t[1].round() as i64,
            t[2].round() as i64,
        );
        let drift = t
            .iter()
            .map(|x| (x - x.round()).abs())
            .fold(0.0_f64, f64::max);
        traces.record(&point, drift);
        if !trace_triples.contains(&rounded) {
            trace_triples.push(rounded);
        }
    }

    let constant = trace_triples.len() == 1;
    if let Some((a, b, c)) = trace_triples.first() {
        traces.note(format!("projector traces ({a}, {b}, {c})"));
    }
    if !constant {
        traces.note("traces varied across samples");
    }
    let trace_pass = constant && traces.max() <= 1e-8;
    Ok(VerificationReport::new(vec![
        idem.finish(),
        ortho.finish(),
        complete.finish(),
        eigrel.finish(),
        traces.finish_with(trace_pass),
    ]))
}

/// Coefficients of the associated-metric construction.
#[derive(Debug, Clone, Copy)]
pub struct AssociatedMetricConstants {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl AssociatedMetricConstants {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> AssociatedMetricConstants {
        AssociatedMetricConstants {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    /// The admissibility constraint β·b = a·γ/2 + α with α + δ ≠ 0.
    pub fn validate(&self, a: f64, b: f64) -> Result<()> {
        let lhs = self.beta * b;
        let rhs = a * self.gamma / 2.0 + self.alpha;
        if (lhs - rhs).abs() > 1e-12 {
            return Err(Error::InvalidParameters(format!(
                "associated-metric constants violate beta*b = a*gamma/2 + alpha ({lhs} != {rhs})"
            )));
        }
        if (self.alpha + self.delta).abs() < 1e-12 {
            return Err(Error::InvalidParameters(
                "associated-metric constants need alpha + delta != 0".into(),
            ));
        }
        Ok(())
    }
}

/// The associated metric of a quadratic φ-structure at a point:
/// h = h̃(φ²·, φ²·) + η⊗η, then
/// g = [α h + β h(φ·,φ·) + (γ/2)(h(φ·,·) + h(·,φ·)) + δ η⊗η] / (α + δ).
pub fn associated_metric(
    h_tilde: &DMatrix<f64>,
    s: &QuadraticPhiStructure,
    constants: &AssociatedMetricConstants,
    chart: &ChartedManifold,
    point: &[f64],
) -> Result<DMatrix<f64>> {
    constants.validate(s.a, s.b)?;
    let (phi, eta, _) = s.values_at(chart, point)?;
    let dim = chart.dim();
    if h_tilde.nrows() != dim || h_tilde.ncols() != dim {
        return Err(Error::InvalidParameters(format!(
            "auxiliary metric must be {dim}x{dim}"
        )));
    }
    let eta_eta = DMatrix::from_fn(dim, dim, |i, j| eta[i] * eta[j]);
    let phi2 = &phi * &phi;
    let h = phi2.transpose() * h_tilde * &phi2 + &eta_eta;
    let pt = phi.transpose();
    let g = (constants.alpha * &h
        + constants.beta * (&pt * &h * &phi)
        + constants.gamma / 2.0 * (&pt * &h + &h * &phi)
        + constants.delta * &eta_eta)
        / (constants.alpha + constants.delta);
    Ok(g)
}

/// Verifier for the associated-metric construction: symmetry, g(·, ξ) = η,
/// g(ξ,ξ) = 1, and the metric relation with p ≡ a, q ≡ b. The smallest
/// eigenvalue is reported as a note (the construction is not definite for
/// every admissible constant set).
pub fn verify_associated_metric(
    h_tilde: &DMatrix<f64>,
    s: &QuadraticPhiStructure,
    constants: &AssociatedMetricConstants,
    chart: &ChartedManifold,
    sampling: &Sampling,
) -> Result<VerificationReport> {
    let dim = chart.dim();
    let mut sym = ResidualStat::new("associated_metric.symmetry", sampling.tol);
    let mut dual = ResidualStat::new("associated_metric.xi_duality", sampling.tol);
    let mut unit = ResidualStat::new("associated_metric.unit_xi", sampling.tol);
    let mut metric_rel = ResidualStat::new("associated_metric.metric_relation", sampling.tol);
    let mut min_eig = f64::INFINITY;

    for point in chart.sample_points(sampling.count, sampling.seed) {
        let g = associated_metric(h_tilde, s, constants, chart, &point)?;
        let (phi, eta, xi) = s.values_at(chart, &point)?;

        sym.record(&point, mat_max_abs(&(&g - &g.transpose())));

        let gxi = &g * DVector::from_column_slice(&xi);
        let r: f64 = gxi
            .iter()
            .zip(&eta)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        dual.record(&point, r);

        let gxixi = (DVector::from_column_slice(&xi).transpose() * &gxi)[(0, 0)];
        unit.record(&point, (gxixi - 1.0).abs());

        let eta_eta = DMatrix::from_fn(dim, dim, |i, j| eta[i] * eta[j]);
        let pt = phi.transpose();
        let res = &pt * &g * &phi - s.a * (&pt * &g) - s.b * (&g - eta_eta);
        metric_rel.record(&point, mat_max_abs(&res));

        let eigs = g.symmetric_eigen().eigenvalues;
        min_eig = min_eig.min(eigs.iter().copied().fold(f64::INFINITY, f64::min));
    }

    sym.note(format!("smallest eigenvalue over samples: {min_eig:.6e}"));
    Ok(VerificationReport::new(vec![
        sym.finish(),
        dual.finish(),
        unit.finish(),
        metric_rel.finish(),
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Expr};

    const GOLDEN: f64 = 1.618033988749895;

    fn flat_chart(dim: usize) -> ChartedManifold {
        let coords: Vec<String> = (0..dim).map(|i| format!("x{}", i + 1)).collect();
        ChartedManifold::euclidean(coords, vec![(-1.0, 1.0); dim])
    }

    fn sampling(count: usize) -> Sampling {
        Sampling::new(count, 7, 1e-9)
    }

    #[test]
    fn golden_number() {
        let sigma = metallic_number(1, 1).unwrap();
        assert!((sigma - GOLDEN).abs() < 1e-15);
        // Vieta: σ + σ̄ = p, σ σ̄ = −q
        let s = MetallicStructure::diagonal(1, 1, 2, 1).unwrap();
        assert!((s.sigma + s.sigma_bar - 1.0).abs() < 1e-15);
        assert!((s.sigma * s.sigma_bar + 1.0).abs() < 1e-15);
    }

    #[test]
    fn silver_number_matches_bisection_oracle() {
        // Root of x² − 2x − 1 located by bisection, independent of the
        // closed form.
        let f = |x: f64| x * x - 2.0 * x - 1.0;
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert!((metallic_number(2, 1).unwrap() - oracle).abs() < 1e-12);
        assert!((metallic_number(2, 1).unwrap() - (1.0 + 2.0_f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn metallic_number_rejects_nonpositive_parameters() {
        assert!(matches!(
            metallic_number(0, 1),
            Err(Error::InvalidParameters(_))
        ));
        assert!(matches!(
            metallic_number(1, 0),
            Err(Error::InvalidParameters(_))
        ));
    }

    #[test]
    fn sigma_satisfies_its_quadratic() {
        for (p, q) in [(1u32, 1u32), (2, 1), (3, 1), (1, 2), (4, 3)] {
            let s = metallic_number(p, q).unwrap();
            assert!((s * s - p as f64 * s - q as f64).abs() <= 1e-12);
            let bar = p as f64 - s;
            assert!((bar * bar - p as f64 * bar - q as f64).abs() <= 1e-12);
        }
    }

    #[test]
    fn golden_diagonal_induces_diag_plus_minus_one() {
        let chart = flat_chart(2);
        let s = MetallicStructure::diagonal(1, 1, 2, 1).unwrap();
        let f = product_from_metallic(&s, Sign::Plus);
        let fv = f.field.value_at(&chart, &[0.0, 0.0]).unwrap();
        assert!((fv[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((fv[(1, 1)] + 1.0).abs() < 1e-12);
        assert!(fv[(0, 1)].abs() < 1e-15 && fv[(1, 0)].abs() < 1e-15);
        // F² = I
        let sq = &fv * &fv - DMatrix::identity(2, 2);
        assert!(mat_max_abs(&sq) < 1e-12);
        // F₋ = −F₊
        let fm = product_from_metallic(&s, Sign::Minus)
            .field
            .value_at(&chart, &[0.0, 0.0])
            .unwrap();
        assert!(mat_max_abs(&(fm + fv)) < 1e-15);
    }

    #[test]
    fn product_metallic_round_trip() {
        let chart = flat_chart(2);
        for (p, q) in [(1u32, 1u32), (2, 1), (3, 1), (1, 2)] {
            let s = MetallicStructure::diagonal(p, q, 2, 1).unwrap();
            let f = product_from_metallic(&s, Sign::Plus);
            let back = metallic_from_product(&f, p, q, Sign::Plus).unwrap();
            let j0 = s.field.value_at(&chart, &[0.1, 0.2]).unwrap();
            let j1 = back.field.value_at(&chart, &[0.1, 0.2]).unwrap();
            assert!(mat_max_abs(&(j1 - j0)) <= 1e-12, "(p,q)=({p},{q})");
        }
    }

    #[test]
    fn identity_product_structure_gives_sigma_scaling() {
        let chart = flat_chart(2);
        let f = AlmostProductStructure {
            field: TensorField11::identity(2),
        };
        let j = metallic_from_product(&f, 1, 1, Sign::Plus).unwrap();
        let jv = j.field.value_at(&chart, &[0.0, 0.0]).unwrap();
        assert!((jv[(0, 0)] - GOLDEN).abs() < 1e-12);
        assert!((jv[(1, 1)] - GOLDEN).abs() < 1e-12);
    }

    #[test]
    fn random_reflection_round_trips_both_ways() {
        let chart = flat_chart(2);
        // Reflection across a tilted axis: F² = I, F ≠ ±I.
        let (c, s) = (0.8, 0.6);
        let f0 = DMatrix::from_row_slice(2, 2, &[c, s, s, -c]);
        let f = AlmostProductStructure {
            field: TensorField11::constant(&f0),
        };
        let j = metallic_from_product(&f, 2, 1, Sign::Plus).unwrap();
        let fv = product_from_metallic(&j, Sign::Plus)
            .field
            .value_at(&chart, &[0.3, -0.4])
            .unwrap();
        assert!(mat_max_abs(&(fv - f0)) <= 1e-12);
        // The produced J satisfies its quadratic.
        let jv = j.field.value_at(&chart, &[0.3, -0.4]).unwrap();
        let res = &jv * &jv - 2.0 * &jv - DMatrix::identity(2, 2);
        assert!(mat_max_abs(&res) <= 1e-12);
    }

    #[test]
    fn flat_golden_structure_verifies() {
        let chart = flat_chart(4);
        let s = MetallicStructure::diagonal(1, 1, 4, 2).unwrap();
        let report = verify_metallic(&chart, &s, &sampling(30)).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.max_residual("metallic.") <= 1e-12);
        let lm = verify_locally_metallic(&chart, &s, &sampling(20)).unwrap();
        assert!(lm.pass, "{lm:?}");
    }

    #[test]
    fn identity_tensor_fails_m1() {
        let chart = flat_chart(2);
        let s = MetallicStructure::new(1, 1, TensorField11::identity(2)).unwrap();
        let report = verify_metallic(&chart, &s, &sampling(5)).unwrap();
        let poly = report.check("metallic.polynomial").unwrap();
        assert!(!poly.pass);
        assert!((poly.max_residual - 1.0).abs() < 1e-14);
    }

    #[test]
    fn position_dependent_rotation_of_golden_fails_parallelism() {
        // J(x) = R(x₁) diag(σ, σ̄) R(x₁)ᵀ is metallic everywhere but not
        // parallel.
        let coords = ["x1", "x2"];
        let sigma = GOLDEN;
        let bar = 1.0 - GOLDEN;
        let d = sigma - bar;
        let e = |s: &str| parse(s, &coords).unwrap();
        let j11 = e(&format!("{sigma} * cos(x1)^2 + {bar} * sin(x1)^2"));
        let j12 = e(&format!("{d} * sin(x1) * cos(x1)"));
        let j22 = e(&format!("{sigma} * sin(x1)^2 + {bar} * cos(x1)^2"));
        let field = TensorField11::from_rows(vec![
            vec![j11, j12.clone()],
            vec![j12, j22],
        ])
        .unwrap();
        let s = MetallicStructure::new(1, 1, field).unwrap();
        let chart = flat_chart(2);
        let ok = verify_metallic(&chart, &s, &sampling(20)).unwrap();
        assert!(ok.pass, "pointwise algebra should hold: {ok:?}");
        let lm = verify_locally_metallic(&chart, &s, &sampling(20)).unwrap();
        let nabla = lm.check("locally_metallic.nabla_j").unwrap();
        assert!(!nabla.pass);
        assert!(nabla.max_residual > 1e-3);
    }

    fn quadratic_r4(chart: &ChartedManifold) -> QuadraticPhiStructure {
        let _ = chart;
        let phi = TensorField11::constant(&DMatrix::from_row_slice(
            4,
            4,
            &[
                2.0, 1.0, 0.0, 0.0, //
                9.0, 2.0, 0.0, 0.0, //
                0.0, 0.0, 5.0, 0.0, //
                0.0, 0.0, 0.0, 0.0,
            ],
        ));
        let eta = OneForm::constant(&[0.0, 0.0, 0.0, 1.0]);
        let xi = VectorField::constant(&[0.0, 0.0, 0.0, 1.0]);
        QuadraticPhiStructure::new(4.0, 5.0, phi, eta, xi).unwrap()
    }

    #[test]
    fn r4_structural_residuals_vanish() {
        let chart = flat_chart(4);
        let s = quadratic_r4(&chart);
        let report = verify_quadratic_phi(&chart, &s, &sampling(10), false).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.max_residual("quadratic_phi.quadratic"), 0.0);
    }

    #[test]
    fn r4_eigenvalues_match_quadratic_roots() {
        let chart = flat_chart(4);
        let s = quadratic_r4(&chart);
        let (lp, lm) = s.lambda().unwrap();
        assert_eq!((lp, lm), (5.0, -1.0));
        // Oracle: eigen-decomposition of the explicit matrix.
        let phi = s.phi.value_at(&chart, &[0.0; 4]).unwrap();
        let mut eigs: Vec<f64> = phi.complex_eigenvalues().iter().map(|c| c.re).collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((eigs[0] - -1.0).abs() < 1e-10);
        assert!(eigs[1].abs() < 1e-10);
        assert!((eigs[2] - 5.0).abs() < 1e-10);
        assert!((eigs[3] - 5.0).abs() < 1e-10);
    }

    #[test]
    fn spectral_projector_traces_are_eigenspace_dimensions() {
        let chart = flat_chart(4);
        let s = quadratic_r4(&chart);
        let proj = spectral_projectors(&chart, &s, &[0.0; 4]).unwrap();
        assert!((proj.p_plus.trace() - 2.0).abs() < 1e-10);
        assert!((proj.p_minus.trace() - 1.0).abs() < 1e-10);
        assert!((proj.p_zero.trace() - 1.0).abs() < 1e-10);
        let sum = &proj.p_plus + &proj.p_minus + &proj.p_zero;
        assert_eq!(mat_max_abs(&(sum - DMatrix::identity(4, 4))), 0.0);
        let report = verify_spectral(&chart, &s, &sampling(5)).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn symmetric_split_projects_with_half_identity_formula() {
        // a = 0, b = 1: P± = ½(I − ξ⊗η ± φ).
        let chart = flat_chart(3);
        let phi = TensorField11::constant(&DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        ));
        let eta = OneForm::constant(&[0.0, 0.0, 1.0]);
        let xi = VectorField::constant(&[0.0, 0.0, 1.0]);
        let s = QuadraticPhiStructure::new(0.0, 1.0, phi, eta, xi).unwrap();
        let proj = spectral_projectors(&chart, &s, &[0.0; 3]).unwrap();
        let (pm, em, xm) = s.values_at(&chart, &[0.0; 3]).unwrap();
        let closed =
            0.5 * (DMatrix::identity(3, 3) - eta_outer_xi(&xm, &em) + &pm);
        assert!(mat_max_abs(&(&proj.p_plus - closed)) < 1e-14);
    }

    #[test]
    fn complex_spectrum_is_rejected() {
        let chart = flat_chart(2);
        let phi = TensorField11::constant(&DMatrix::from_row_slice(
            2,
            2,
            &[0.0, 1.0, -1.0, 0.0],
        ));
        let eta = OneForm::constant(&[0.0, 0.0]);
        let xi = VectorField::constant(&[0.0, 0.0]);
        let s = QuadraticPhiStructure::new(0.0, -0.5, phi, eta, xi).unwrap();
        assert!(matches!(
            spectral_projectors(&chart, &s, &[0.0, 0.0]),
            Err(Error::ComplexSpectrum { .. })
        ));
    }

    #[test]
    fn associated_metric_constraint_gate() {
        let chart = flat_chart(4);
        let s = quadratic_r4(&chart);
        let h = DMatrix::identity(4, 4);
        // 1·5 ≠ 4·(1/2) + 1
        let bad = AssociatedMetricConstants::new(1.0, 1.0, 1.0, 1.0);
        assert!(matches!(
            associated_metric(&h, &s, &bad, &chart, &[0.0; 4]),
            Err(Error::InvalidParameters(_))
        ));
        // 1·5 = 4·(2/2) + 1
        let good = AssociatedMetricConstants::new(1.0, 1.0, 2.0, 1.0);
        assert!(associated_metric(&h, &s, &good, &chart, &[0.0; 4]).is_ok());
    }

    #[test]
    fn associated_metric_satisfies_its_postconditions() {
        let chart = flat_chart(4);
        let s = quadratic_r4(&chart);
        let h = DMatrix::identity(4, 4);
        let c = AssociatedMetricConstants::new(1.0, 1.0, 2.0, 1.0);
        let report = verify_associated_metric(&h, &s, &c, &chart, &sampling(5)).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.max_residual("associated_metric.metric_relation") <= 1e-9);
    }

    #[test]
    fn associated_metric_with_gamma_zero_is_positive_definite() {
        let chart = flat_chart(4);
        let s = quadratic_r4(&chart);
        let h = DMatrix::identity(4, 4);
        // γ = 0 pattern: β b = α.
        let c = AssociatedMetricConstants::new(5.0, 1.0, 0.0, 5.0);
        let g = associated_metric(&h, &s, &c, &chart, &[0.0; 4]).unwrap();
        let eigs = g.symmetric_eigen().eigenvalues;
        assert!(eigs.iter().all(|&e| e > 0.0), "eigs {eigs:?}");
    }

    #[test]
    fn quadratic_structure_rejects_degenerate_parameters() {
        let phi = TensorField11::identity(2);
        let eta = OneForm::constant(&[0.0, 1.0]);
        let xi = VectorField::constant(&[0.0, 1.0]);
        assert!(QuadraticPhiStructure::new(1.0, 0.0, phi.clone(), eta.clone(), xi.clone()).is_err());
        assert!(QuadraticPhiStructure::new(2.0, -1.0, phi, eta, xi).is_err());
    }

    #[test]
    fn degenerate_dimension_one_structure_passes() {
        // φ = 0 on a line: I = η⊗ξ, so the quadratic identity collapses.
        let chart = ChartedManifold::euclidean(vec!["t".into()], vec![(-1.0, 1.0)]);
        let s = QuadraticPhiStructure::new(
            3.0,
            2.0,
            TensorField11::from_rows(vec![vec![Expr::zero()]]).unwrap(),
            OneForm::constant(&[1.0]),
            VectorField::constant(&[1.0]),
        )
        .unwrap();
        let report = verify_quadratic_phi(&chart, &s, &sampling(5), true).unwrap();
        for name in [
            "quadratic_phi.quadratic",
            "quadratic_phi.phi_xi",
            "quadratic_phi.eta_xi",
            "quadratic_phi.eta_phi",
        ] {
            assert!(report.check(name).unwrap().pass, "{name}");
        }
    }
}
