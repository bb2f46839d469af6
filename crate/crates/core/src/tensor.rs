//! Charts, metrics, tensor fields, and the Levi-Civita machinery.
//!
//! Everything is single-chart and pointwise: fields are matrices/vectors of
//! expressions over the chart coordinates, and all derivatives come from
//! exact jets of those expressions.

use std::ops::Add;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expr::{eval_jet2, eval_value, Expr, Jet2};
use crate::sample::sample_box;

/// Smallest metric eigenvalue accepted as positive definite.
const METRIC_EIGENVALUE_FLOOR: f64 = 1e-10;

/// A coordinate chart with a symmetric metric given entry-wise as
/// expressions. Only the upper triangle is stored.
#[derive(Debug, Clone)]
pub struct ChartedManifold {
    coords: Vec<String>,
    sample_box: Vec<(f64, f64)>,
    metric_upper: Vec<Expr>, // packed upper triangle, (i, j) with i <= j
}

fn packed_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

impl ChartedManifold {
    /// Build from a full matrix of expressions; entries across the diagonal
    /// must be structurally identical.
    pub fn from_matrix(
        coords: Vec<String>,
        sample_box: Vec<(f64, f64)>,
        rows: Vec<Vec<Expr>>,
    ) -> Result<ChartedManifold> {
        let dim = coords.len();
        if dim == 0 {
            return Err(Error::InvalidParameters("empty coordinate list".into()));
        }
        if sample_box.len() != dim || rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidParameters(format!(
                "chart of dimension {dim} needs a {dim}x{dim} metric and {dim} sample intervals"
            )));
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidParameters(format!(
                        "metric entries ({i},{j}) and ({j},{i}) differ structurally"
                    )));
                }
            }
        }
        let mut metric_upper = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                metric_upper.push(rows[i][j].clone());
            }
        }
        let chart = ChartedManifold {
            coords,
            sample_box,
            metric_upper,
        };
        chart.check_variables()?;
        Ok(chart)
    }

    /// Euclidean chart: identity metric on the given box.
    pub fn euclidean(coords: Vec<String>, sample_box: Vec<(f64, f64)>) -> ChartedManifold {
        let dim = coords.len();
        let rows: Vec<Vec<Expr>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { Expr::one() } else { Expr::zero() })
                    .collect()
            })
            .collect();
        ChartedManifold::from_matrix(coords, sample_box, rows).expect("identity metric is valid")
    }

    fn check_variables(&self) -> Result<()> {
        for entry in &self.metric_upper {
            for name in entry.variables() {
                if !self.coords.contains(&name) {
                    return Err(Error::UnknownVariable {
                        name,
                        coords: self.coords.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    pub fn metric_entry(&self, i: usize, j: usize) -> &Expr {
        &self.metric_upper[packed_index(self.dim(), i, j)]
    }

    /// Full metric matrix as expressions (mirrored across the diagonal).
    pub fn metric_rows(&self) -> Vec<Vec<Expr>> {
        let dim = self.dim();
        (0..dim)
            .map(|i| (0..dim).map(|j| self.metric_entry(i, j).clone()).collect())
            .collect()
    }

    /// Deterministic low-discrepancy sample points of the chart box.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        sample_box(&self.sample_box, count, seed)
    }

    /// Metric values at a point.
    pub fn metric_at(&self, point: &[f64]) -> Result<DMatrix<f64>> {
        let dim = self.dim();
        let mut g = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = eval_value(self.metric_entry(i, j), &self.coords, point)?;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(g)
    }

    /// Levi-Civita data at a point: metric, inverse, Christoffel symbols, and
    /// their first derivatives.
    pub fn frame_at(&self, point: &[f64]) -> Result<PointFrame> {
        PointFrame::compute(self, point)
    }
}

/// A (1,1) tensor field: a dim × dim matrix of expressions K^i_j.
#[derive(Debug, Clone)]
pub struct TensorField11 {
    dim: usize,
    entries: Vec<Expr>, // row-major, entry (i, j) = K^i_j
}

impl TensorField11 {
    pub fn from_rows(rows: Vec<Vec<Expr>>) -> Result<TensorField11> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidParameters(
                "tensor field component matrix must be square".into(),
            ));
        }
        Ok(TensorField11 {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn constant(matrix: &DMatrix<f64>) -> TensorField11 {
        let dim = matrix.nrows();
        let entries = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| Expr::Const(matrix[(i, j)]))
            .collect();
        TensorField11 { dim, entries }
    }

    pub fn identity(dim: usize) -> TensorField11 {
        TensorField11::constant(&DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i * self.dim + j]
    }

    /// Entry-wise `a * self + b * I`.
    pub fn affine(&self, a: f64, b: f64) -> TensorField11 {
        let dim = self.dim;
        let entries = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| {
                let scaled = self.entry(i, j).clone().scale(a);
                if i == j {
                    scaled.add(Expr::Const(b))
                } else {
                    scaled
                }
            })
            .collect();
        TensorField11 { dim, entries }
    }

    pub fn value_at(&self, chart: &ChartedManifold, point: &[f64]) -> Result<DMatrix<f64>> {
        let dim = self.dim;
        let mut out = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] = eval_value(self.entry(i, j), chart.coords(), point)?;
            }
        }
        Ok(out)
    }

    pub fn jets_at(&self, chart: &ChartedManifold, point: &[f64]) -> Result<Vec<Jet2>> {
        self.entries
            .iter()
            .map(|e| eval_jet2(e, chart.coords(), point))
            .collect()
    }
}

/// A vector field X^i as a list of component expressions.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(comps: Vec<Expr>) -> VectorField {
        VectorField { comps }
    }

    pub fn constant(values: &[f64]) -> VectorField {
        VectorField {
            comps: values.iter().map(|v| Expr::Const(*v)).collect(),
        }
    }

    /// The `k`-th coordinate basis field on a dim-dimensional chart.
    pub fn coordinate(dim: usize, k: usize) -> VectorField {
        VectorField::constant(
            &(0..dim)
                .map(|i| if i == k { 1.0 } else { 0.0 })
                .collect::<Vec<_>>(),
        )
    }

    pub fn value_at(&self, chart: &ChartedManifold, point: &[f64]) -> Result<Vec<f64>> {
        self.comps
            .iter()
            .map(|e| eval_value(e, chart.coords(), point))
            .collect()
    }

    pub fn jets_at(&self, chart: &ChartedManifold, point: &[f64]) -> Result<Vec<Jet2>> {
        self.comps
            .iter()
            .map(|e| eval_jet2(e, chart.coords(), point))
            .collect()
    }
}

/// A one-form η_i as a list of component expressions.
#[derive(Debug, Clone)]
pub struct OneForm {
    pub comps: Vec<Expr>,
}

impl OneForm {
    pub fn new(comps: Vec<Expr>) -> OneForm {
        OneForm { comps }
    }

    pub fn constant(values: &[f64]) -> OneForm {
        OneForm {
            comps: values.iter().map(|v| Expr::Const(*v)).collect(),
        }
    }

    pub fn value_at(&self, chart: &ChartedManifold, point: &[f64]) -> Result<Vec<f64>> {
        self.comps
            .iter()
            .map(|e| eval_value(e, chart.coords(), point))
            .collect()
    }

    pub fn jets_at(&self, chart: &ChartedManifold, point: &[f64]) -> Result<Vec<Jet2>> {
        self.comps
            .iter()
            .map(|e| eval_jet2(e, chart.coords(), point))
            .collect()
    }
}

/// Levi-Civita data of a chart at one point.
///
/// `christoffel[k][(i, j)]` is Γ^k_{ij} and `dchristoffel[m][k][(i, j)]` is
/// ∂_m Γ^k_{ij}; both come from exact first and second metric derivatives.
#[derive(Debug, Clone)]
pub struct PointFrame {
    pub point: Vec<f64>,
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    /// dg[k][(i, j)] = ∂_k g_{ij}
    pub dg: Vec<DMatrix<f64>>,
    pub christoffel: Vec<DMatrix<f64>>,
    pub dchristoffel: Vec<Vec<DMatrix<f64>>>,
}

impl PointFrame {
    fn compute(chart: &ChartedManifold, point: &[f64]) -> Result<PointFrame> {
        let dim = chart.dim();
        let mut metric = DMatrix::zeros(dim, dim);
        let mut dg = vec![DMatrix::zeros(dim, dim); dim];
        let mut d2g = vec![vec![DMatrix::zeros(dim, dim); dim]; dim]; // [m][l] -> ∂_m ∂_l g
        for i in 0..dim {
            for j in i..dim {
                let jet = eval_jet2(chart.metric_entry(i, j), chart.coords(), point)?;
                metric[(i, j)] = jet.value();
                metric[(j, i)] = jet.value();
                for k in 0..dim {
                    dg[k][(i, j)] = jet.gradient()[k];
                    dg[k][(j, i)] = jet.gradient()[k];
                }
                for m in 0..dim {
                    for l in 0..dim {
                        d2g[m][l][(i, j)] = jet.hess(m, l);
                        d2g[m][l][(j, i)] = jet.hess(m, l);
                    }
                }
            }
        }

        let eigen = metric.clone().symmetric_eigen();
        if eigen.eigenvalues.iter().any(|&e| e <= METRIC_EIGENVALUE_FLOOR) {
            return Err(Error::SingularMetric {
                point: point.to_vec(),
            });
        }
        let metric_inv = metric.clone().try_inverse().ok_or(Error::SingularMetric {
            point: point.to_vec(),
        })?;

        // Γ^k_{ij} = ½ g^{kl} (∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})
        let mut christoffel = vec![DMatrix::zeros(dim, dim); dim];
        for k in 0..dim {
            for i in 0..dim {
                for j in i..dim {
                    let mut sum = 0.0;
                    for l in 0..dim {
                        sum += metric_inv[(k, l)]
                            * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                    }
                    christoffel[k][(i, j)] = 0.5 * sum;
                    christoffel[k][(j, i)] = 0.5 * sum;
                }
            }
        }

        // ∂_m g^{kl} = −g^{ka} ∂_m g_{ab} g^{bl}
        let mut dginv = vec![DMatrix::zeros(dim, dim); dim];
        for m in 0..dim {
            dginv[m] = -&metric_inv * &dg[m] * &metric_inv;
        }

        let mut dchristoffel = vec![vec![DMatrix::zeros(dim, dim); dim]; dim];
        for m in 0..dim {
            for k in 0..dim {
                for i in 0..dim {
                    for j in i..dim {
                        let mut sum = 0.0;
                        for l in 0..dim {
                            sum += dginv[m][(k, l)]
                                * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                            sum += metric_inv[(k, l)]
                                * (d2g[m][i][(j, l)] + d2g[m][j][(i, l)] - d2g[m][l][(i, j)]);
                        }
                        dchristoffel[m][k][(i, j)] = 0.5 * sum;
                        dchristoffel[m][k][(j, i)] = 0.5 * sum;
                    }
                }
            }
        }

        Ok(PointFrame {
            point: point.to_vec(),
            metric,
            metric_inv,
            dg,
            christoffel,
            dchristoffel,
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    /// Riemann tensor components R^l_{kij}, meaning R(∂_i, ∂_j)∂_k = R^l_{kij} ∂_l,
    /// in the convention R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z.
    pub fn riemann_component(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        let mut r = self.dchristoffel[i][l][(j, k)] - self.dchristoffel[j][l][(i, k)];
        for m in 0..self.dim() {
            r += self.christoffel[l][(i, m)] * self.christoffel[m][(j, k)]
                - self.christoffel[l][(j, m)] * self.christoffel[m][(i, k)];
        }
        r
    }
}

/// Γ^k_{ij} at a point, indexed `[k][(i, j)]`.
pub fn christoffel(chart: &ChartedManifold, point: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    Ok(chart.frame_at(point)?.christoffel)
}

/// (∇_X K)Y at a point for a (1,1) tensor field K and tangent vectors X, Y
/// given by their values:
/// ((∇_X K)Y)^k = X^i (∂_i K^k_j + Γ^k_{im} K^m_j − Γ^m_{ij} K^k_m) Y^j.
pub fn covariant_derivative_11(
    chart: &ChartedManifold,
    field: &TensorField11,
    x: &[f64],
    y: &[f64],
    point: &[f64],
) -> Result<Vec<f64>> {
    let frame = chart.frame_at(point)?;
    let jets = field.jets_at(chart, point)?;
    let dim = chart.dim();
    let entry = |i: usize, j: usize| -> &Jet2 { &jets[i * dim + j] };
    let mut out = vec![0.0; dim];
    for k in 0..dim {
        let mut sum = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let mut term = entry(k, j).gradient()[i];
                for m in 0..dim {
                    term += frame.christoffel[k][(i, m)] * entry(m, j).value();
                    term -= frame.christoffel[m][(i, j)] * entry(k, m).value();
                }
                sum += x[i] * term * y[j];
            }
        }
        out[k] = sum;
    }
    Ok(out)
}

/// (∇_X ξ)^k = X^i (∂_i ξ^k + Γ^k_{im} ξ^m) for a vector field ξ.
pub fn covariant_derivative_vector(
    chart: &ChartedManifold,
    xi: &VectorField,
    x: &[f64],
    point: &[f64],
) -> Result<Vec<f64>> {
    let frame = chart.frame_at(point)?;
    let jets = xi.jets_at(chart, point)?;
    let dim = chart.dim();
    let mut out = vec![0.0; dim];
    for k in 0..dim {
        let mut sum = 0.0;
        for i in 0..dim {
            let mut term = jets[k].gradient()[i];
            for m in 0..dim {
                term += frame.christoffel[k][(i, m)] * jets[m].value();
            }
            sum += x[i] * term;
        }
        out[k] = sum;
    }
    Ok(out)
}

/// ((∇_X η)Y) = X^i (∂_i η_j − Γ^m_{ij} η_m) Y^j for a one-form η.
pub fn covariant_derivative_oneform(
    chart: &ChartedManifold,
    eta: &OneForm,
    x: &[f64],
    y: &[f64],
    point: &[f64],
) -> Result<f64> {
    let frame = chart.frame_at(point)?;
    let jets = eta.jets_at(chart, point)?;
    let dim = chart.dim();
    let mut sum = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let mut term = jets[j].gradient()[i];
            for m in 0..dim {
                term -= frame.christoffel[m][(i, j)] * jets[m].value();
            }
            sum += x[i] * term * y[j];
        }
    }
    Ok(sum)
}

/// Largest component of ∇g at a point: (∇_i g)_{jk} = ∂_i g_{jk} − Γ^m_{ij} g_{mk} − Γ^m_{ik} g_{jm}.
pub fn metric_compatibility_residual(chart: &ChartedManifold, point: &[f64]) -> Result<f64> {
    let frame = chart.frame_at(point)?;
    let dim = chart.dim();
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                let mut v = frame.dg[i][(j, k)];
                for m in 0..dim {
                    v -= frame.christoffel[m][(i, j)] * frame.metric[(m, k)];
                    v -= frame.christoffel[m][(i, k)] * frame.metric[(j, m)];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// [X, Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k, evaluated with jets.
pub fn lie_bracket(
    chart: &ChartedManifold,
    x: &VectorField,
    y: &VectorField,
    point: &[f64],
) -> Result<Vec<f64>> {
    let xj = x.jets_at(chart, point)?;
    let yj = y.jets_at(chart, point)?;
    Ok(bracket_of_jets(&xj, &yj))
}

/// Bracket of two vector fields given as component jets at a point.
fn bracket_of_jets(x: &[Jet2], y: &[Jet2]) -> Vec<f64> {
    let dim = x.len();
    (0..dim)
        .map(|k| {
            (0..dim)
                .map(|i| x[i].value() * y[k].gradient()[i] - y[i].value() * x[k].gradient()[i])
                .sum()
        })
        .collect()
}

/// N_K(X,Y) = K²[X,Y] + [KX,KY] − K[KX,Y] − K[X,KY] at a point.
///
/// Products like KX are formed at the jet level so that the brackets see the
/// exact first derivatives of the product components.
pub fn nijenhuis(
    chart: &ChartedManifold,
    field: &TensorField11,
    x: &VectorField,
    y: &VectorField,
    point: &[f64],
) -> Result<Vec<f64>> {
    let dim = chart.dim();
    let kj = field.jets_at(chart, point)?;
    let xj = x.jets_at(chart, point)?;
    let yj = y.jets_at(chart, point)?;

    let apply_jets = |v: &[Jet2]| -> Vec<Jet2> {
        (0..dim)
            .map(|i| {
                let mut acc = Jet2::constant(dim, 0.0);
                for j in 0..dim {
                    acc = acc.add(&kj[i * dim + j].mul(&v[j]));
                }
                acc
            })
            .collect()
    };
    let k_value = |v: &[f64]| -> Vec<f64> {
        (0..dim)
            .map(|i| (0..dim).map(|j| kj[i * dim + j].value() * v[j]).sum())
            .collect()
    };

    let kx = apply_jets(&xj);
    let ky = apply_jets(&yj);

    let xy = bracket_of_jets(&xj, &yj);
    let kxky = bracket_of_jets(&kx, &ky);
    let kxy = bracket_of_jets(&kx, &yj);
    let xky = bracket_of_jets(&xj, &ky);

    let kkxy = k_value(&k_value(&xy));
    let k_kxy = k_value(&kxy);
    let k_xky = k_value(&xky);

    Ok((0..dim)
        .map(|k| kkxy[k] + kxky[k] - k_kxy[k] - k_xky[k])
        .collect())
}

/// R(X,Y)Z at a point from tangent-vector values, by contracting the
/// curvature components of the frame.
pub fn riemann(
    chart: &ChartedManifold,
    x: &[f64],
    y: &[f64],
    z: &[f64],
    point: &[f64],
) -> Result<Vec<f64>> {
    let frame = chart.frame_at(point)?;
    Ok(riemann_apply(&frame, x, y, z))
}

/// R(X,Y)Z from an already-computed frame.
pub fn riemann_apply(frame: &PointFrame, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let dim = frame.dim();
    let mut out = vec![0.0; dim];
    for l in 0..dim {
        let mut sum = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    sum += frame.riemann_component(l, k, i, j) * x[i] * y[j] * z[k];
                }
            }
        }
        out[l] = sum;
    }
    out
}

pub fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn mat_max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn inner(g: &DMatrix<f64>, a: &[f64], b: &[f64]) -> f64 {
    let av = DVector::from_column_slice(a);
    let bv = DVector::from_column_slice(b);
    (av.transpose() * g * bv)[(0, 0)]
}
