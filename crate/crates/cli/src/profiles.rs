//! CSV data for plots: the sech kernel transform, the theta sweep,
//! a finite-difference order curve and the Poisson smoothing chain.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use doiforge::besov::{besov_chain_check, BesovOptions, SampledFunction};
use doiforge::harness::{log_log_slope, order_curve, theta_sweep, TheoremId};
use doiforge::kernels::{fourier_profile, GFamily, GridConfig};
use doiforge::{NormSpec, ScalarFunction, TrialRng};

use crate::{create_out, write_file, CliError};

pub const SECH_FILE: &str = "sech_half_profile.csv";
pub const THETA_FILE: &str = "theta_sweep.csv";
pub const ORDER_FILE: &str = "thm18_order_curve.csv";
pub const BESOV_FILE: &str = "besov_chain.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileConfig {
    pub seed: u64,
    pub n: usize,
    pub norm: NormSpec,
    pub theta: f64,
    pub quick: bool,
    pub out: PathBuf,
}

fn to_io(e: std::fmt::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn buffer(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

pub fn sech_csv() -> Result<Vec<u8>, CliError> {
    let p = fourier_profile(GFamily::SechHalf, GridConfig::default())?;
    buffer(|w| p.write_csv(w))
}

/// Rows `theta,constant,fitted_exponent`; the exponent is one least-squares fit.
pub fn theta_csv() -> Result<Vec<u8>, CliError> {
    let (th, c) = theta_sweep();
    let slope = log_log_slope(&th, &c);
    let mut s = String::from("theta,constant,fitted_exponent\n");
    for (t, k) in th.iter().zip(&c) {
        writeln!(s, "{t:.9e},{k:.12e},{slope:.6}").map_err(to_io)?;
    }
    Ok(s.into_bytes())
}

/// Rows `t,e_one_sided,ratio_one_sided,e_central,ratio_central`; ratios compare with the previous row.
pub fn order_csv(seed: u64, n: usize, norm: NormSpec) -> Result<Vec<u8>, CliError> {
    let mut rng = TrialRng::new(seed, TheoremId::Thm18.stream(), 0);
    let d0 = rng.gaussian_hermitian(n);
    let g = rng.hermitian_with_norm(n, 1.0)?;
    let curve = order_curve(&d0, g.matrix(), norm, 0.1, 12)?;
    let mut s = String::from("t,e_one_sided,ratio_one_sided,e_central,ratio_central\n");
    for k in 0..curve.t.len() {
        let ratio = |e: &[f64]| {
            if k == 0 {
                String::new()
            } else {
                format!("{:.9e}", e[k] / e[k - 1])
            }
        };
        writeln!(
            s,
            "{:.9e},{:.9e},{},{:.9e},{}",
            curve.t[k],
            curve.one_sided[k],
            ratio(&curve.one_sided),
            curve.central[k],
            ratio(&curve.central)
        )
        .map_err(to_io)?;
    }
    Ok(s.into_bytes())
}

pub fn besov_csv(theta: f64, quick: bool) -> Result<Vec<u8>, CliError> {
    let f = SampledFunction::from_function(&ScalarFunction::main_f())?;
    let opts = BesovOptions {
        theta,
        per_decade: if quick { 50 } else { 200 },
        ..BesovOptions::default()
    };
    let chain = besov_chain_check(&f, &opts)?;
    buffer(|w| chain.write_csv(w))
}

/// Writes all four files and returns their paths.
pub fn emit_profiles(cfg: &ProfileConfig) -> Result<Vec<PathBuf>, CliError> {
    create_out(&cfg.out)?;
    let put = |name: &str, bytes: Vec<u8>| -> Result<PathBuf, CliError> {
        let path = Path::new(&cfg.out).join(name);
        write_file(&path, &bytes)?;
        Ok(path)
    };
    Ok(vec![
        put(SECH_FILE, sech_csv()?)?,
        put(THETA_FILE, theta_csv()?)?,
        put(ORDER_FILE, order_csv(cfg.seed, cfg.n, cfg.norm)?)?,
        put(BESOV_FILE, besov_csv(cfg.theta, cfg.quick)?)?,
    ])
}
