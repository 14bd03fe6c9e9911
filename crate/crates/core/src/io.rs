//! Flat-file emission: coefficient tables, symbol tables, residual
//! histories, and trajectories as CSV. Column orders are fixed; floats use
//! the shortest round-trip representation, so identical inputs give
//! byte-identical files.

use std::io::{self, Write};

use crate::linear::SymbolRow;
use crate::oracle::Trajectory;
use crate::picard::SolveReport;
use crate::scalar::Scalar;
use crate::spectral::SpectralField;

/// `m,n1[,n2,n3],re,im`, rows ordered by temporal mode then flattened
/// spatial index.
pub fn write_coefficient_csv<T: Scalar>(
    out: &mut impl Write,
    field: &SpectralField<T>,
) -> io::Result<()> {
    let dim = field.basis().dim();
    write!(out, "m")?;
    for axis in 0..dim {
        write!(out, ",n{}", axis + 1)?;
    }
    writeln!(out, ",re,im")?;
    let mut multi = vec![0usize; dim];
    for m in -(field.m_max() as i64)..=(field.m_max() as i64) {
        for flat in 0..field.spatial_len() {
            field.basis().decode_multi(flat, &mut multi);
            write!(out, "{m}")?;
            for (axis, &idx) in multi.iter().enumerate() {
                write!(out, ",{}", field.basis().wavenumber(axis, idx))?;
            }
            let c = field.get(m, flat);
            writeln!(out, ",{},{}", c.re, c.im)?;
        }
    }
    Ok(())
}

/// `m,n1[,n2,n3],abs_sigma` for resonance-sweep plotting.
pub fn write_symbol_csv<T: Scalar>(out: &mut impl Write, rows: &[SymbolRow<T>]) -> io::Result<()> {
    let dim = rows.first().map(|r| r.n.len()).unwrap_or(1);
    write!(out, "m")?;
    for axis in 0..dim {
        write!(out, ",n{}", axis + 1)?;
    }
    writeln!(out, ",abs_sigma")?;
    for row in rows {
        write!(out, "{}", row.m)?;
        for n in &row.n {
            write!(out, ",{n}")?;
        }
        writeln!(out, ",{}", row.abs_sigma)?;
    }
    Ok(())
}

/// `iteration,residual,ratio` (the first rows have no ratio).
pub fn write_residual_history_csv<T: Scalar>(
    out: &mut impl Write,
    report: &SolveReport<T>,
) -> io::Result<()> {
    writeln!(out, "iteration,residual,ratio")?;
    for (i, r) in report.residual_history.iter().enumerate() {
        // ratios start once two steps exist
        match i
            .checked_sub(2)
            .and_then(|j| report.contraction_ratios.get(j))
        {
            Some(ratio) => writeln!(out, "{},{},{}", i + 1, r, ratio)?,
            None => writeln!(out, "{},{},", i + 1, r)?,
        }
    }
    Ok(())
}

/// `t_index,t,n1[,n2,n3],value` for one period of sampled attractor
/// coefficients; the same layout a coefficient table takes per time sample.
pub fn write_trajectory_csv<T: Scalar>(
    out: &mut impl Write,
    trajectory: &Trajectory<T>,
) -> io::Result<()> {
    let dim = trajectory.basis.dim();
    write!(out, "t_index,t")?;
    for axis in 0..dim {
        write!(out, ",n{}", axis + 1)?;
    }
    writeln!(out, ",value")?;
    let mut multi = vec![0usize; dim];
    for (i, (t, sample)) in trajectory
        .times
        .iter()
        .zip(&trajectory.u_samples)
        .enumerate()
    {
        for (flat, value) in sample.iter().enumerate() {
            trajectory.basis.decode_multi(flat, &mut multi);
            write!(out, "{i},{t}")?;
            for (axis, &idx) in multi.iter().enumerate() {
                write!(out, ",{}", trajectory.basis.wavenumber(axis, idx))?;
            }
            writeln!(out, ",{value}")?;
        }
    }
    Ok(())
}
