use super::batch::Batch;
use super::scalar::Dual;

/// A differentiable loss over a flat parameter vector and a data batch.
///
/// The loss is the *mean* per-sample loss over the batch, so gradients and
/// Hessians inherit the `1/|batch|` factor. Implementations must be pure:
/// the same `(w, batch)` always produces the same result, and evaluation
/// must not mutate shared state (concurrent calls are allowed).
pub trait Objective: Send + Sync {
    /// Fixed parameter count `m`; every operation on this objective uses
    /// vectors of exactly this length.
    fn param_count(&self) -> usize;

    /// Forward pass only.
    fn loss(&self, w: &[f64], batch: &Batch<'_>) -> f64 {
        self.loss_and_grad(w, batch).0
    }

    /// One forward plus one reverse pass.
    fn loss_and_grad(&self, w: &[f64], batch: &Batch<'_>) -> (f64, Vec<f64>);

    /// Tangent-mode overload of [`Objective::loss_and_grad`]: running the
    /// same passes on dual numbers seeded with `w + ε·v` makes the dual part
    /// of the gradient an exact Hessian-vector product `H·v`.
    fn loss_and_grad_dual(&self, w: &[Dual], batch: &Batch<'_>) -> (Dual, Vec<Dual>);

    /// Whether evaluation is bit-reproducible. All built-in objectives are.
    fn deterministic(&self) -> bool {
        true
    }
}
