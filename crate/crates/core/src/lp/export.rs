//! CPLEX LP text writer.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::linear::{Direction, LinearModel, Sense};

const TERMS_PER_LINE: usize = 8;

/// Formats like C's `%.17g`, which round-trips every finite double.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "+inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Column names with brackets replaced by parentheses, which LP readers accept.
fn lp_name(name: &str) -> String {
    name.chars()
        .map(|c| match c {
            '[' => '(',
            ']' => ')',
            c if c.is_ascii_alphanumeric() || "!\"#$%&()/,.;?@_`'{}|~".contains(c) => c,
            _ => '_',
        })
        .collect()
}

fn write_terms<W: Write>(w: &mut W, terms: &[(usize, f64)], names: &[String]) -> std::io::Result<()> {
    if terms.is_empty() {
        if let Some(first) = names.first() {
            write!(w, " 0 {first}")?;
        }
        return Ok(());
    }
    for (k, &(j, a)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            write!(w, "\n  ")?;
        }
        let sign = if a < 0.0 { "-" } else { "+" };
        if k == 0 && a >= 0.0 {
            write!(w, " {} {}", format_number(a), names[j])?;
        } else {
            write!(w, " {sign} {} {}", format_number(a.abs()), names[j])?;
        }
    }
    Ok(())
}

/// Writes `model` in CPLEX LP format, declaring `binaries` (column indices) as binary.
pub fn write_lp<W: Write>(model: &LinearModel, binaries: &[usize], mut w: W) -> Result<()> {
    let names: Vec<String> = model.variables().iter().map(|v| lp_name(&v.name)).collect();
    writeln!(w, "\\ written by lpcc")?;
    writeln!(
        w,
        "{}",
        match model.direction() {
            Direction::Max => "Maximize",
            Direction::Min => "Minimize",
        }
    )?;
    let obj: Vec<(usize, f64)> = model
        .objective()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(j, &c)| (j, c))
        .collect();
    write!(w, " obj:")?;
    write_terms(&mut w, &obj, &names)?;
    writeln!(w)?;
    writeln!(w, "Subject To")?;
    for (i, c) in model.constraints().iter().enumerate() {
        write!(w, " r{}:", i + 1)?;
        write_terms(&mut w, &c.terms, &names)?;
        let op = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        writeln!(w, " {op} {}", format_number(c.rhs))?;
    }
    writeln!(w, "Bounds")?;
    for (v, name) in model.variables().iter().zip(&names) {
        let (lo, up) = (v.lower, v.upper);
        if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            writeln!(w, " {name} free")?;
        } else if lo == up {
            writeln!(w, " {name} = {}", format_number(lo))?;
        } else if up == f64::INFINITY {
            writeln!(w, " {name} >= {}", format_number(lo))?;
        } else {
            writeln!(w, " {} <= {name} <= {}", format_number(lo), format_number(up))?;
        }
    }
    if !binaries.is_empty() {
        writeln!(w, "Binaries")?;
        for &j in binaries {
            writeln!(w, " {}", names[j])?;
        }
    }
    writeln!(w, "End")?;
    Ok(())
}

pub fn export_lp_file(model: &LinearModel, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_lp(model, &[], &mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        assert_eq!(format_number(3.0), "3");
        assert_eq!(format_number(-0.5), "-0.5");
        assert_eq!(format_number(0.1), "0.10000000000000001");
        assert_eq!(format_number(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_number(1e20), "1e+20");
        for v in [0.1, 1.0 / 3.0, -2.5e-17, 123456.789, 6.02e23, 7.0] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn skeleton_and_equality() {
        let mut m = LinearModel::new(Direction::Max);
        let x = m.add_variable("x[1]", 0.0, 1.0).unwrap();
        let y = m.add_variable("v[T1,y2]", f64::NEG_INFINITY, f64::INFINITY).unwrap();
        m.set_objective(x, 2.0);
        m.add_constraint(vec![(x, 1.0), (y, -1.0)], Sense::Eq, 0.0).unwrap();
        let mut buf = Vec::new();
        write_lp(&m, &[x], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("Maximize\n obj: 2 x(1)\n"));
        assert!(text.contains(" r1: 1 x(1) - 1 v(T1,y2) = 0\n"));
        assert!(text.contains("Bounds\n 0 <= x(1) <= 1\n v(T1,y2) free\n"));
        assert!(text.contains("Binaries\n x(1)\n"));
        assert!(text.ends_with("End\n"));
    }
}
