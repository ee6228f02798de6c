//! `rho`, `I` and `J` of translates `u(. - y)` against their autonomous limits.

use crate::energy::{energy_inf, energy_unchecked, ProblemSpec};
use crate::error::{Error, Result};
use crate::grid::{offset_to_cells, translate_cells, Field};
use crate::scalar::Scalar;
use crate::varexp::{luxemburg_unchecked, norm_inf, rho_inf, rho_unchecked, Exponent, Potential};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationRow<T> {
    /// `|y|`.
    pub distance: T,
    pub rho: T,
    pub norm: T,
    pub energy: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslationTable<T> {
    pub rows: Vec<TranslationRow<T>>,
    pub rho_inf: T,
    pub norm_inf: T,
    pub energy_inf: T,
}

fn support_size<T: Scalar>(u: &Field<T>) -> usize {
    (0..u.len())
        .filter(|&i| !u.grid().is_boundary(i) && u.values()[i] != T::zero())
        .count()
}

/// One row per shift. A shift that pushes part of the support onto the
/// boundary layer or off the grid is rejected.
pub fn translation_experiment<T: Scalar>(
    u: &Field<T>,
    p: &Exponent<T>,
    v: &Potential<T>,
    shifts: &[Vec<T>],
) -> Result<TranslationTable<T>> {
    let spec = ProblemSpec::new(p.clone(), v.clone())?;
    u.check_same_grid(p.field())?;
    let grid = u.grid();
    if (0..u.len()).any(|i| grid.is_boundary(i) && u.values()[i] != T::zero()) {
        return Err(Error::InvalidShift("u must vanish on the boundary layer".into()));
    }
    let size = support_size(u);
    let mut rows = Vec::with_capacity(shifts.len());
    for y in shifts {
        let cells = offset_to_cells(grid, y)?;
        let moved = translate_cells(u, &cells)?;
        if support_size(&moved) != size
            || (0..u.len()).any(|i| grid.is_boundary(i) && moved.values()[i] != T::zero())
        {
            return Err(Error::InvalidShift(format!(
                "shift {y:?} moves the support out of the domain interior"
            )));
        }
        let distance = y.iter().fold(T::zero(), |acc, &c| acc.hypot(c));
        rows.push(TranslationRow {
            distance,
            rho: rho_unchecked(&moved, p),
            norm: luxemburg_unchecked(&moved, p)?,
            energy: energy_unchecked(&moved, &spec),
        });
    }
    Ok(TranslationTable {
        rows,
        rho_inf: rho_inf(u, p.p_inf()),
        norm_inf: norm_inf(u, p.p_inf()),
        energy_inf: energy_inf(u, v.v_inf()),
    })
}
