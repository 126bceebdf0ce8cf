use super::{Mode, OperatorParams};
use crate::error::{Error, Result};
use crate::geometry::{Domain, ScalarField, Slot, DX, DXX, DXY, DY, DYY};

fn forcing(p: &OperatorParams, w: f64) -> (f64, f64) {
    match p.mode {
        Mode::Translator => (p.t * w, p.t),
        Mode::Weighted => {
            let s = w.sqrt();
            (p.t * w + p.mu * w * s, p.t + 1.5 * p.mu * s)
        }
        Mode::Serrin => {
            let e = p.n_exp / 2.0;
            let c = 2.0 * p.t * p.h_coef;
            (c * w.powf(e), c * e * w.powf(e - 1.0))
        }
    }
}

/// `Q` evaluated on the derivative vector `[u_x, u_y, u_xx, u_xy, u_yy]`.
pub fn operator_value(p: &OperatorParams, d: &[f64; 5]) -> f64 {
    let (ux, uy) = (d[DX], d[DY]);
    let w = 1.0 + ux * ux + uy * uy;
    (1.0 + uy * uy) * d[DXX] - 2.0 * ux * uy * d[DXY] + (1.0 + ux * ux) * d[DYY] - forcing(p, w).0
}

/// `Q` and its partial derivatives with respect to the five derivatives.
pub fn operator_partials(p: &OperatorParams, d: &[f64; 5]) -> (f64, [f64; 5]) {
    let (ux, uy, r, s, t) = (d[DX], d[DY], d[DXX], d[DXY], d[DYY]);
    let w = 1.0 + ux * ux + uy * uy;
    let (g, dg) = forcing(p, w);
    let q = (1.0 + uy * uy) * r - 2.0 * ux * uy * s + (1.0 + ux * ux) * t - g;
    let mut j = [0.0; 5];
    j[DX] = 2.0 * ux * t - 2.0 * uy * s - 2.0 * ux * dg;
    j[DY] = 2.0 * uy * r - 2.0 * ux * s - 2.0 * uy * dg;
    j[DXX] = 1.0 + uy * uy;
    j[DXY] = -2.0 * ux * uy;
    j[DYY] = 1.0 + ux * ux;
    (q, j)
}

/// Unscaled discrete `Q[u]` at every unknown.
pub fn residual_values(u: &ScalarField, p: &OperatorParams) -> Vec<f64> {
    (0..u.grid().num_unknowns()).map(|k| operator_value(p, &u.derivatives(k))).collect()
}

/// Discrete `Q[u]` as a field with zero boundary values.
pub fn residual(u: &ScalarField, p: &OperatorParams, dom: &Domain) -> Result<ScalarField> {
    if u.grid().domain() != dom {
        return Err(Error::MaskMismatch("field grid was built for a different domain".into()));
    }
    p.validate()?;
    let g = u.grid().clone();
    let nb = g.num_boundary();
    ScalarField::new(g, residual_values(u, p), vec![0.0; nb])
}

/// Unscaled Jacobian entries `(row, col, value)` over all unknowns.
pub fn jacobian_entries(u: &ScalarField, p: &OperatorParams) -> Vec<(usize, usize, f64)> {
    let g = u.grid();
    let mut out = Vec::new();
    for k in 0..g.num_unknowns() {
        let (_, dq) = operator_partials(p, &u.derivatives(k));
        for (slot, w) in &g.stencil(k).entries {
            if let Slot::Unknown(j) = *slot {
                out.push((k, j as usize, (0..5).map(|i| dq[i] * w[i]).sum()));
            }
        }
    }
    out
}

/// Jacobian-vector product of the unscaled residual.
pub fn jacobian_apply(u: &ScalarField, p: &OperatorParams, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; u.grid().num_unknowns()];
    for (i, j, a) in jacobian_entries(u, p) {
        out[i] += a * v[j];
    }
    out
}
