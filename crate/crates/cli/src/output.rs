//! Profile tables and JSON sidecars.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use imperfect_crack::profile::SolutionProfile;
use serde::Serialize;

pub const PROFILE_SCHEMA: &str = "# imperfect-crack profile v1";

fn field(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

/// Header names. A single component uses the bare names; several get a
/// `_<component>` suffix.
fn header(p: &SolutionProfile) -> Vec<String> {
    let mut h = vec!["x1".to_string()];
    let names = ["jump_u", "jump_u_star", "traction", "t_star"];
    for &c in &p.components {
        for n in names {
            if p.components.len() == 1 {
                h.push(n.to_string());
            } else {
                h.push(format!("{n}_{c}"));
            }
        }
    }
    h.push("region".to_string());
    h
}

pub fn write_profile_to<W: Write>(mut w: W, p: &SolutionProfile) -> io::Result<()> {
    writeln!(w, "{PROFILE_SCHEMA}")?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(header(p))?;
    for i in 0..p.len() {
        let mut row = vec![p.x1[i].to_string()];
        for k in 0..p.components.len() {
            row.push(field(p.jump_u[k][i]));
            row.push(field(p.jump_u_star[k][i]));
            row.push(field(p.traction[k][i]));
            row.push(field(p.t_star[k][i]));
        }
        row.push(p.region[i].as_str().to_string());
        csv.write_record(row)?;
    }
    csv.flush()
}

pub fn write_profile(path: &Path, p: &SolutionProfile) -> io::Result<()> {
    write_profile_to(BufWriter::new(File::create(path)?), p)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()
}
