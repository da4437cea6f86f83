//! θ-ODE pipeline, explicit finite-difference march for v(x, t) and a
//! periodic pseudo-spectral solver.

pub mod fd;
pub mod fft;
pub mod spectral;
pub mod theta;

/// One CSV line, every float with 17 significant digits.
pub fn csv_row(values: &[f64]) -> String {
    let mut s = values.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}
