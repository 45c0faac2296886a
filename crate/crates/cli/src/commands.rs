use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::{json, Value};

use nswiener_core::algebra::{adjoint, multiply, norms_with_seed};
use nswiener_core::dense_oracle::DEFAULT_SEED;
use nswiener_core::factorization::{
    cayley_check_with_seed, spectral_factor_with, verify_factorization, FactorOptions,
    VerifyOptions,
};
use nswiener_core::zadeh::zadeh_eval;
use nswiener_core::{IndexWindow, NSOperator, Verification, WienerError};

use crate::error::{CliError, Exit};
use crate::operator_file::{parse_operator, write_operator};
use crate::{Command, SEED_ENV};

pub fn execute(command: Command) -> Result<Exit, CliError> {
    match command {
        Command::Multiply { a, b, out } => {
            let product = multiply(&read_operator(&a)?, &read_operator(&b)?)?;
            write_file(&out, &write_operator(&product))?;
            Ok(Exit::Ok)
        }
        Command::Adjoint { input, out } => {
            write_file(&out, &write_operator(&adjoint(&read_operator(&input)?)))?;
            Ok(Exit::Ok)
        }
        Command::Norm { input } => {
            let r = norms_with_seed(&read_operator(&input)?, seed()?);
            print_json(&json!({
                "wiener": r.wiener,
                "hilbert_schmidt": r.hilbert_schmidt,
                "operator_norm_estimate": r.operator_norm_estimate,
            }));
            Ok(Exit::Ok)
        }
        Command::Zadeh { input, z, out } => {
            let z = parse_point(&z)?;
            let eval = zadeh_eval(&read_operator(&input)?, z)?;
            let text = write_operator(&eval.result);
            match out {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(Exit::Ok)
        }
        Command::Factor {
            input,
            prefix,
            pad,
            tol,
            eps_tail,
            max_offset,
            t_samples,
            verify_tol,
        } => factor(
            &input,
            &prefix,
            FactorOptions {
                pad,
                tol,
                eps_tail,
                max_offset,
                ..FactorOptions::default()
            },
            &parse_samples(&t_samples)?,
            verify_tol,
        ),
        Command::Verify {
            input,
            factor,
            t_samples,
            tol,
            pad,
        } => {
            let w = read_operator(&input)?;
            let f = read_operator(&factor)?;
            let samples = parse_samples(&t_samples)?;
            let opts = VerifyOptions {
                tol,
                pad,
                ..VerifyOptions::default()
            };
            let v = verify_factorization(&w, &f, &samples, &opts)?;
            for line in &v.log {
                eprintln!("{line}");
            }
            print_json(&verification_json(&v, &samples, tol));
            Ok(if v.passed {
                Exit::Ok
            } else {
                Exit::VerificationFailed
            })
        }
    }
}

fn factor(
    input: &Path,
    prefix: &Path,
    opts: FactorOptions,
    samples: &[f64],
    verify_tol: f64,
) -> Result<Exit, CliError> {
    let w = read_operator(input)?;
    let report = match spectral_factor_with(&w, &opts) {
        Ok(r) => r,
        Err(e @ WienerError::NotUniformlyPositive { certificate, .. }) => {
            eprintln!("positivity certificate: {certificate:.6e}");
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    let verify_opts = VerifyOptions {
        tol: verify_tol,
        pad: Some(2 * report.pad),
        eps_tail: report.eps_tail,
        max_offset: Some(report.max_offset),
    };
    let v = verify_factorization(&w, &report.factor, samples, &verify_opts)?;
    let cayley = cayley_check_with_seed(&w, report.pad, seed()?)?;
    for line in report.warnings.iter().chain(&v.log) {
        eprintln!("{line}");
    }

    write_file(
        &with_suffix(prefix, "factor.json"),
        &write_operator(&report.factor),
    )?;
    write_file(
        &with_suffix(prefix, "inverse.json"),
        &write_operator(&report.inverse_factor),
    )?;
    let doc = json!({
        "accepted_window": window_json(report.accepted_window),
        "pad": report.pad,
        "tol": report.tol,
        "eps_tail": report.eps_tail,
        "max_offset": report.max_offset,
        "min_eig_certificate": report.min_eig_certificate,
        "reconstruction_residual": report.reconstruction_residual,
        "inverse_residual": report.inverse_residual,
        "stabilization_gap": report.stabilization_gap,
        "tail_mass": report.tail_mass,
        "decay_rate": report.decay_rate,
        "cayley": {
            "s_norm_estimate": cayley.s_norm_estimate,
            "re_positive": cayley.re_positive,
            "re_lower_bounds": cayley.re_lower_bounds,
        },
        "warnings": report.warnings,
        "verification": verification_json(&v, samples, verify_tol),
    });
    let text = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
    write_file(&with_suffix(prefix, "report.json"), &text)?;
    Ok(if v.passed {
        Exit::Ok
    } else {
        Exit::VerificationFailed
    })
}

fn verification_json(v: &Verification, samples: &[f64], tol: f64) -> Value {
    json!({
        "t_samples": samples,
        "window": window_json(v.window),
        "tol": tol,
        "reconstruction": v.reconstruction,
        "boundary": v.boundary.iter().map(|&(t, r)| json!({"t": t, "residual": r})).collect::<Vec<_>>(),
        "inverse": v.inverse,
        "uniqueness": v.uniqueness,
        "passed": v.passed,
    })
}

fn window_json(w: IndexWindow) -> Value {
    json!([w.lo(), w.hi()])
}

fn print_json(v: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("report serializes")
    );
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

pub fn read_operator(path: &Path) -> Result<NSOperator, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_operator(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        message: e.0,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

/// Seed from the environment, decimal or `0x` hexadecimal.
fn seed() -> Result<u64, CliError> {
    let Ok(raw) = std::env::var(SEED_ENV) else {
        return Ok(DEFAULT_SEED);
    };
    let s = raw.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| CliError::Flag {
        flag: SEED_ENV,
        message: format!("\"{raw}\" is not an unsigned integer"),
    })
}

pub fn parse_point(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Flag {
        flag: "--z",
        message: format!("expected \"re,im\", got \"{s}\""),
    };
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

pub fn parse_samples(s: &str) -> Result<Vec<f64>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| match t.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(CliError::Flag {
                flag: "--t-samples",
                message: format!("\"{}\" is not a finite number", t.trim()),
            }),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_parsing() {
        assert_eq!(parse_samples("0,1.57,3.0").unwrap(), vec![0.0, 1.57, 3.0]);
        assert!(parse_samples("0,x").is_err());
        assert_eq!(
            parse_point("0.5, -0.25").unwrap(),
            Complex64::new(0.5, -0.25)
        );
        assert!(parse_point("0.5").is_err());
        assert_eq!(
            with_suffix(Path::new("out/w"), "factor.json"),
            PathBuf::from("out/w.factor.json")
        );
    }
}
