use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::batch::Batch;
use super::error::DiffError;
use super::objective::Objective;
use super::scalar::Dual;
use super::vecmath::{first_non_finite, l2_norm, max_abs};

/// Loss and gradient at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct GradResult {
    pub loss: f64,
    pub grad: Vec<f64>,
}

/// How Hessian-vector products are computed.
///
/// `ExactSecondOrder` differentiates the gradient in tangent mode and is
/// exact to rounding. `GradientFd` is a central difference of two gradients:
/// `(∇L(w + h·v̂) − ∇L(w − h·v̂)) · |v| / (2h)` with `v̂ = v/|v|`, `h = fd_step`.
/// It exists so that engines without second-order differentiation can still
/// run every spectrum operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HvpBackend {
    ExactSecondOrder,
    GradientFd { fd_step: f64 },
}

impl HvpBackend {
    /// Finite-difference backend with the default step `1e-4·(1 + |w|∞)`.
    pub fn gradient_fd_auto(w: &[f64]) -> Self {
        HvpBackend::GradientFd {
            fd_step: 1e-4 * (1.0 + max_abs(w)),
        }
    }
}

// Serialized as a flat string ("exact_second_order" or "gradient_fd:<step>")
// so reports stay flat JSON objects.
impl Serialize for HvpBackend {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            HvpBackend::ExactSecondOrder => serializer.serialize_str("exact_second_order"),
            HvpBackend::GradientFd { fd_step } => {
                serializer.serialize_str(&format!("gradient_fd:{fd_step}"))
            }
        }
    }
}

impl<'de> Deserialize<'de> for HvpBackend {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s == "exact_second_order" {
            return Ok(HvpBackend::ExactSecondOrder);
        }
        if let Some(step) = s.strip_prefix("gradient_fd:") {
            let fd_step: f64 = step
                .parse()
                .map_err(|_| D::Error::custom(format!("bad fd step in backend string: {s}")))?;
            return Ok(HvpBackend::GradientFd { fd_step });
        }
        Err(D::Error::custom(format!("unknown hvp backend: {s}")))
    }
}

fn check_inputs(w: &[f64], batch: &Batch<'_>) -> Result<(), DiffError> {
    if batch.is_empty() {
        return Err(DiffError::EmptyBatch);
    }
    if let Some(i) = first_non_finite(w) {
        return Err(DiffError::NonFiniteParam(i));
    }
    Ok(())
}

/// Scans per-sample losses to name the batch row that went non-finite.
fn blame_batch_index<O: Objective + ?Sized>(obj: &O, w: &[f64], batch: &Batch<'_>) -> usize {
    (0..batch.len())
        .find(|&i| !obj.loss(w, &batch.row_view(i)).is_finite())
        .unwrap_or(0)
}

/// Mean batch loss and its gradient; one forward plus one reverse pass.
pub fn value_and_grad<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    batch: &Batch<'_>,
) -> Result<GradResult, DiffError> {
    check_inputs(w, batch)?;
    let (loss, grad) = obj.loss_and_grad(w, batch);
    if !loss.is_finite() {
        return Err(DiffError::NonFiniteLoss {
            batch_index: blame_batch_index(obj, w, batch),
        });
    }
    if let Some(i) = first_non_finite(&grad) {
        return Err(DiffError::NonFiniteGradient(i));
    }
    Ok(GradResult { loss, grad })
}

/// Hessian-vector product `H·v` with `H = ∂²L/∂w²` at `w`.
pub fn hvp<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    v: &[f64],
    batch: &Batch<'_>,
    backend: HvpBackend,
) -> Result<Vec<f64>, DiffError> {
    check_inputs(w, batch)?;
    if v.len() != w.len() {
        return Err(DiffError::ShapeMismatch {
            expected: w.len(),
            got: v.len(),
        });
    }
    if let Some(i) = first_non_finite(v) {
        return Err(DiffError::NonFiniteParam(i));
    }
    let v_norm = l2_norm(v);
    if v_norm == 0.0 {
        return Err(DiffError::ZeroProbe);
    }

    match backend {
        HvpBackend::ExactSecondOrder => {
            let wd: Vec<Dual> = w
                .iter()
                .zip(v)
                .map(|(&wi, &vi)| Dual::new(wi, vi))
                .collect();
            let (loss, grad) = obj.loss_and_grad_dual(&wd, batch);
            if !loss.re.is_finite() {
                return Err(DiffError::NonFiniteLoss {
                    batch_index: blame_batch_index(obj, w, batch),
                });
            }
            let out: Vec<f64> = grad.iter().map(|g| g.du).collect();
            if first_non_finite(&out).is_some() || grad.iter().any(|g| !g.re.is_finite()) {
                return Err(DiffError::NonFiniteLoss { batch_index: 0 });
            }
            Ok(out)
        }
        HvpBackend::GradientFd { fd_step } => {
            if fd_step <= 0.0 || !fd_step.is_finite() {
                return Err(DiffError::InvalidFdStep(fd_step));
            }
            let h = fd_step;
            let unit: Vec<f64> = v.iter().map(|x| x / v_norm).collect();
            let wp: Vec<f64> = w.iter().zip(&unit).map(|(x, u)| x + h * u).collect();
            let wm: Vec<f64> = w.iter().zip(&unit).map(|(x, u)| x - h * u).collect();
            let gp = value_and_grad(obj, &wp, batch)?;
            let gm = value_and_grad(obj, &wm, batch)?;
            let scale = v_norm / (2.0 * h);
            Ok(gp
                .grad
                .iter()
                .zip(&gm.grad)
                .map(|(p, m)| (p - m) * scale)
                .collect())
        }
    }
}
