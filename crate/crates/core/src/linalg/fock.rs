use super::{ComplexMatrix, ModeOccupation};
use crate::error::{ensure, Result};
use crate::scalar::Real;

/// `n x n` matrix whose permanent is the transition amplitude from `input` to `output`.
///
/// Row `i` of `u` is repeated `input[i]` times and column `j` is repeated
/// `output[j]` times.
pub fn transition_submatrix<T: Real>(
    u: &ComplexMatrix<T>,
    input: &ModeOccupation,
    output: &ModeOccupation,
) -> Result<ComplexMatrix<T>> {
    ensure!(u.is_square(), Dimension, "interferometer must be square, got {}x{}", u.rows(), u.cols());
    ensure!(
        input.modes() == u.rows() && output.modes() == u.rows(),
        Dimension,
        "patterns over {} and {} modes for a {}-mode interferometer",
        input.modes(),
        output.modes(),
        u.rows()
    );
    ensure!(
        input.photons() == output.photons(),
        Contract,
        "input carries {} photons but output carries {}",
        input.photons(),
        output.photons()
    );
    let rows = input.mode_list();
    let cols = output.mode_list();
    Ok(ComplexMatrix::from_fn(rows.len(), cols.len(), |i, j| u[(rows[i], cols[j])]))
}
