//! Case files.
//!
//! Two layouts are accepted:
//!
//! * the native line-oriented format, which must declare its units:
//!
//!   ```text
//!   format radial-case 1
//!   base_mva 10
//!   base_kv 12.66
//!   impedance_unit ohm        # ohm | pu
//!   power_unit kw             # kw | mw | pu
//!   scale 1.0                 # optional
//!   bus 1 0 0
//!   bus 2 100 60 [name]
//!   branch 1 2 0.0922 0.0470
//!   ```
//!
//! * MATPOWER-style `mpc.baseMVA`, `mpc.bus` and `mpc.branch` tables (P/Q in
//!   MW/MVAr, impedances in p.u.). Other tables are ignored; the slack bus
//!   must be bus 1.
//!
//! Everything is converted to per-unit on the case bases during parsing.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::loads::LoadSpec;
use crate::network::{build_network, Bases, Branch, Bus, RadialNetwork};

#[derive(Debug, Clone, Copy, PartialEq)]
enum ImpedanceUnit {
    Ohm,
    Pu,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PowerUnit {
    Kw,
    Mw,
    Pu,
}

/// Reads a case file in either supported layout.
pub fn parse_case(path: impl AsRef<Path>) -> Result<(RadialNetwork, Vec<LoadSpec>)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_case_str(&text, &path.display().to_string())
}

/// Parses case text; `origin` names the source in error messages.
pub fn parse_case_str(text: &str, origin: &str) -> Result<(RadialNetwork, Vec<LoadSpec>)> {
    if text.contains("mpc.bus") || text.contains("mpc.baseMVA") {
        parse_matpower(text, origin)
    } else {
        parse_native(text, origin)
    }
}

struct Cursor<'a> {
    origin: &'a str,
    line: usize,
    raw: &'a str,
}

impl Cursor<'_> {
    fn error(&self, token: Option<&str>, message: impl Into<String>) -> Error {
        let column = token
            .and_then(|t| {
                let start = t.as_ptr() as usize;
                let base = self.raw.as_ptr() as usize;
                (start >= base && start <= base + self.raw.len()).then(|| start - base + 1)
            })
            .unwrap_or(1);
        Error::ParseError {
            file: self.origin.to_string(),
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn number(&self, tok: Option<&str>, what: &str) -> Result<f64> {
        let t = tok.ok_or_else(|| self.error(None, format!("missing {what}")))?;
        t.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.error(Some(t), format!("invalid {what} '{t}'")))
    }

    fn id(&self, tok: Option<&str>, what: &str) -> Result<usize> {
        let t = tok.ok_or_else(|| self.error(None, format!("missing {what}")))?;
        t.parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| self.error(Some(t), format!("invalid {what} '{t}'")))
    }
}

fn radial(err: Error) -> Error {
    match err {
        Error::CycleDetected { .. } | Error::Disconnected(_) | Error::DuplicateBranch { .. } | Error::BadRoot => {
            Error::NonRadial(err.to_string())
        }
        other => other,
    }
}

fn parse_native(text: &str, origin: &str) -> Result<(RadialNetwork, Vec<LoadSpec>)> {
    let mut format_seen = false;
    let mut base_mva = None;
    let mut base_kv = None;
    let mut z_unit = None;
    let mut p_unit = None;
    let mut scale = 1.0;
    let mut buses: Vec<(usize, f64, f64, Option<String>, usize)> = Vec::new();
    let mut branches: Vec<(usize, usize, f64, f64, usize, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let cur = Cursor {
            origin,
            line: i + 1,
            raw,
        };
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(key) = toks.next() else { continue };
        match key {
            "format" => {
                let kind = toks.next();
                let version = toks.next();
                if kind != Some("radial-case") || version != Some("1") {
                    return Err(cur.error(kind, "expected 'format radial-case 1'"));
                }
                format_seen = true;
            }
            "name" => {}
            "base_mva" => base_mva = Some(cur.number(toks.next(), "base_mva")?),
            "base_kv" => base_kv = Some(cur.number(toks.next(), "base_kv")?),
            "scale" => scale = cur.number(toks.next(), "scale")?,
            "impedance_unit" => {
                let t = toks.next();
                z_unit = Some(match t {
                    Some("ohm") => ImpedanceUnit::Ohm,
                    Some("pu") => ImpedanceUnit::Pu,
                    _ => return Err(cur.error(t, "impedance_unit must be 'ohm' or 'pu'")),
                });
            }
            "power_unit" => {
                let t = toks.next();
                p_unit = Some(match t {
                    Some("kw") => PowerUnit::Kw,
                    Some("mw") => PowerUnit::Mw,
                    Some("pu") => PowerUnit::Pu,
                    _ => return Err(cur.error(t, "power_unit must be 'kw', 'mw' or 'pu'")),
                });
            }
            "bus" => {
                let id = cur.id(toks.next(), "bus id")?;
                let p = cur.number(toks.next(), "active power")?;
                let q = cur.number(toks.next(), "reactive power")?;
                let name = toks.next().map(str::to_string);
                buses.push((id, p, q, name, i + 1));
            }
            "branch" => {
                let from = cur.id(toks.next(), "from bus")?;
                let to = cur.id(toks.next(), "to bus")?;
                let r = cur.number(toks.next(), "resistance")?;
                let x = cur.number(toks.next(), "reactance")?;
                branches.push((from, to, r, x, i + 1, raw.to_string()));
            }
            other => return Err(cur.error(Some(other), format!("unknown record '{other}'"))),
        }
        if let Some(extra) = toks.next() {
            if key != "name" && key != "bus" {
                return Err(cur.error(Some(extra), "unexpected trailing field"));
            }
        }
    }

    if !format_seen {
        return Err(Error::UnitAmbiguity(format!(
            "{origin}: missing 'format radial-case 1' header"
        )));
    }
    let (Some(z_unit), Some(p_unit)) = (z_unit, p_unit) else {
        return Err(Error::UnitAmbiguity(format!(
            "{origin}: both impedance_unit and power_unit must be declared"
        )));
    };
    let (Some(base_mva), Some(base_kv)) = (base_mva, base_kv) else {
        return Err(Error::UnitAmbiguity(format!(
            "{origin}: base_mva and base_kv must be declared"
        )));
    };
    if !(base_mva > 0.0 && base_kv > 0.0) {
        return Err(Error::UnitAmbiguity(format!("{origin}: bases must be positive")));
    }
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!("{origin}: scale must be positive")));
    }
    let bases = Bases::new(base_mva, base_kv);

    let known: std::collections::HashSet<usize> = buses.iter().map(|b| b.0).collect();
    for (from, to, _, _, line, raw) in &branches {
        for end in [from, to] {
            if !known.contains(end) {
                let cur = Cursor {
                    origin,
                    line: *line,
                    raw,
                };
                return Err(cur.error(None, format!("branch references unknown bus {end}")));
            }
        }
    }
    if branches.is_empty() {
        return Err(Error::NonRadial(format!("{origin}: no branches")));
    }

    let to_pu_power = |v: f64| match p_unit {
        PowerUnit::Kw => bases.kw_to_pu(v),
        PowerUnit::Mw => v / base_mva,
        PowerUnit::Pu => v,
    };
    let to_pu_z = |v: f64| match z_unit {
        ImpedanceUnit::Ohm => bases.ohm_to_pu(v),
        ImpedanceUnit::Pu => v,
    };

    let mut loads = Vec::with_capacity(buses.len());
    let mut bus_list = Vec::with_capacity(buses.len());
    for (id, p, q, name, _) in &buses {
        loads.push(LoadSpec::constant_power(
            *id,
            to_pu_power(*p) * scale,
            to_pu_power(*q) * scale,
        )?);
        bus_list.push(Bus {
            id: *id,
            name: name.clone(),
        });
    }
    let branch_list = branches
        .iter()
        .map(|(f, t, r, x, _, _)| Branch::new(*f, *t, to_pu_z(*r), to_pu_z(*x)))
        .collect();
    let net = build_network(bus_list, branch_list, bases).map_err(radial)?;
    loads.sort_by_key(|l| l.bus);
    Ok((net, loads))
}

/// Rows of a MATPOWER matrix literal `name = [ ... ];`, with source lines.
fn matpower_table<'a>(text: &'a str, name: &str) -> Option<Vec<(usize, &'a str)>> {
    let mut rows = Vec::new();
    let mut inside = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('%').next().unwrap_or("");
        let mut body = line;
        if !inside {
            let trimmed = line.trim_start();
            let Some(rest) = trimmed.strip_prefix(name) else {
                continue;
            };
            let Some(open) = rest.trim_start().strip_prefix('=') else {
                continue;
            };
            let Some(after) = open.trim_start().strip_prefix('[') else {
                continue;
            };
            inside = true;
            body = after;
        }
        let (content, done) = match body.find(']') {
            Some(end) => (&body[..end], true),
            None => (body, false),
        };
        for row in content.split(';') {
            if !row.trim().is_empty() {
                rows.push((i + 1, row));
            }
        }
        if done {
            return Some(rows);
        }
    }
    None
}

fn matpower_scalar(text: &str, name: &str) -> Option<f64> {
    text.lines().find_map(|raw| {
        let line = raw.split('%').next()?.trim();
        let rest = line.strip_prefix(name)?.trim_start().strip_prefix('=')?;
        rest.trim().trim_end_matches(';').trim().parse().ok()
    })
}

fn parse_matpower(text: &str, origin: &str) -> Result<(RadialNetwork, Vec<LoadSpec>)> {
    let base_mva = matpower_scalar(text, "mpc.baseMVA")
        .ok_or_else(|| Error::UnitAmbiguity(format!("{origin}: mpc.baseMVA is not declared")))?;
    if !(base_mva > 0.0) {
        return Err(Error::UnitAmbiguity(format!("{origin}: mpc.baseMVA must be positive")));
    }
    let bus_rows = matpower_table(text, "mpc.bus").ok_or_else(|| Error::ParseError {
        file: origin.to_string(),
        line: 1,
        column: 1,
        message: "mpc.bus table not found".into(),
    })?;
    let branch_rows = matpower_table(text, "mpc.branch").unwrap_or_default();

    let cell = |line: usize, row: &str, col: usize, what: &str| -> Result<f64> {
        let cur = Cursor { origin, line, raw: row };
        cur.number(row.split_whitespace().nth(col), what)
    };

    let mut base_kv = None;
    let mut buses = Vec::new();
    let mut loads = Vec::new();
    for (line, row) in &bus_rows {
        let id = cell(*line, row, 0, "bus id")?;
        let kind = cell(*line, row, 1, "bus type")?;
        let pd = cell(*line, row, 2, "Pd")?;
        let qd = cell(*line, row, 3, "Qd")?;
        let kv = cell(*line, row, 9, "baseKV").unwrap_or(0.0);
        if id.fract() != 0.0 || id < 1.0 {
            let cur = Cursor {
                origin,
                line: *line,
                raw: row,
            };
            return Err(cur.error(row.split_whitespace().next(), "bus id must be a positive integer"));
        }
        let id = id as usize;
        if kind == 3.0 && id != 1 {
            let cur = Cursor {
                origin,
                line: *line,
                raw: row,
            };
            return Err(cur.error(None, format!("slack bus must be bus 1, found bus {id}")));
        }
        if base_kv.is_none() && kv > 0.0 {
            base_kv = Some(kv);
        }
        buses.push(Bus::new(id));
        loads.push(LoadSpec::constant_power(id, pd / base_mva, qd / base_mva)?);
    }
    let known: std::collections::HashSet<usize> = buses.iter().map(|b| b.id).collect();

    let mut branches = Vec::new();
    for (line, row) in &branch_rows {
        let cur = Cursor {
            origin,
            line: *line,
            raw: row,
        };
        let from = cell(*line, row, 0, "fbus")? as usize;
        let to = cell(*line, row, 1, "tbus")? as usize;
        let r = cell(*line, row, 2, "r")?;
        let x = cell(*line, row, 3, "x")?;
        let in_service = row
            .split_whitespace()
            .nth(10)
            .is_none_or(|s| s.parse::<f64>() != Ok(0.0));
        for end in [from, to] {
            if !known.contains(&end) {
                return Err(cur.error(None, format!("branch references unknown bus {end}")));
            }
        }
        if in_service {
            branches.push(Branch::new(from, to, r, x));
        }
    }
    if branches.is_empty() {
        return Err(Error::NonRadial(format!("{origin}: no in-service branches")));
    }
    let base_kv = base_kv.ok_or_else(|| Error::UnitAmbiguity(format!("{origin}: no bus declares baseKV")))?;
    let net = build_network(buses, branches, Bases::new(base_mva, base_kv)).map_err(radial)?;
    loads.sort_by_key(|l| l.bus);
    Ok((net, loads))
}

/// Serializes a network and its nominal loads in the native format with
/// per-unit quantities. Loads at the same bus are summed; models are not
/// stored.
pub fn write_case(net: &RadialNetwork, loads: &[LoadSpec], name: &str) -> String {
    let bases = net.bases();
    let mut p = vec![0.0; net.n_buses()];
    let mut q = vec![0.0; net.n_buses()];
    for l in loads {
        p[l.bus - 1] += l.p0;
        q[l.bus - 1] += l.q0;
    }
    let mut out = String::new();
    let _ = writeln!(out, "format radial-case 1");
    let _ = writeln!(out, "name {name}");
    let _ = writeln!(out, "base_mva {}", bases.base_mva);
    let _ = writeln!(out, "base_kv {}", bases.base_kv);
    let _ = writeln!(out, "impedance_unit pu");
    let _ = writeln!(out, "power_unit pu");
    for bus in net.buses() {
        let _ = write!(out, "bus {} {} {}", bus.id, p[bus.id - 1], q[bus.id - 1]);
        if let Some(n) = &bus.name {
            let _ = write!(out, " {n}");
        }
        out.push('\n');
    }
    for br in net.branches() {
        let _ = writeln!(out, "branch {} {} {} {}", br.parent, br.child, br.r, br.x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "\
format radial-case 1
base_mva 1
base_kv 1
impedance_unit pu
power_unit pu
bus 1 0 0
bus 2 0.1 0.05 feeder-end
branch 1 2 0.01 0.02
";

    #[test]
    fn parses_native() {
        let (net, loads) = parse_case_str(TINY, "tiny").unwrap();
        assert_eq!(net.n_buses(), 2);
        assert_eq!(loads[1].p0, 0.1);
        assert_eq!(net.buses()[1].name.as_deref(), Some("feeder-end"));
    }

    #[test]
    fn units_are_mandatory() {
        let text = TINY.replace("power_unit pu\n", "");
        assert_eq!(parse_case_str(&text, "t").unwrap_err().kind(), "UnitAmbiguity");
        let text = TINY.replace("format radial-case 1\n", "");
        assert_eq!(parse_case_str(&text, "t").unwrap_err().kind(), "UnitAmbiguity");
    }

    #[test]
    fn empty_branch_table_is_not_radial() {
        let text = TINY.replace("branch 1 2 0.01 0.02\n", "");
        assert_eq!(parse_case_str(&text, "t").unwrap_err().kind(), "NonRadial");
    }

    #[test]
    fn unknown_bus_in_branch() {
        let text = TINY.replace("branch 1 2", "branch 1 7");
        match parse_case_str(&text, "t").unwrap_err() {
            Error::ParseError { line, .. } => assert_eq!(line, 8),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn bad_number_has_position() {
        let text = TINY.replace("bus 2 0.1", "bus 2 0.x1");
        match parse_case_str(&text, "t").unwrap_err() {
            Error::ParseError { line, column, .. } => assert_eq!((line, column), (7, 7)),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn cycle_is_not_radial() {
        let text = format!("{TINY}bus 3 0 0\nbranch 2 3 0.1 0.1\nbranch 3 1 0.1 0.1\n");
        assert_eq!(parse_case_str(&text, "t").unwrap_err().kind(), "NonRadial");
    }

    const MPC: &str = "\
function mpc = case4
mpc.version = '2';
mpc.baseMVA = 10;
%% bus data
mpc.bus = [
\t1\t3\t0\t0\t0\t0\t1\t1\t0\t12.66\t1\t1\t1;
\t2\t1\t0.1\t0.06\t0\t0\t1\t1\t0\t12.66\t1\t1.1\t0.9;
\t3\t1\t0.09\t0.04\t0\t0\t1\t1\t0\t12.66\t1\t1.1\t0.9;
\t4\t1\t0.12\t0.08\t0\t0\t1\t1\t0\t12.66\t1\t1.1\t0.9;
];
mpc.gen = [
\t1\t0\t0\t10\t-10\t1\t100\t1\t10\t0;
];
mpc.branch = [
\t1\t2\t0.0057\t0.0029\t0\t0\t0\t0\t0\t0\t1\t-360\t360;
\t2\t3\t0.0308\t0.0157\t0\t0\t0\t0\t0\t0\t1\t-360\t360;
\t2\t4\t0.0228\t0.0116\t0\t0\t0\t0\t0\t0\t1\t-360\t360;
];
";

    #[test]
    fn parses_matpower_tables() {
        let (net, loads) = parse_case_str(MPC, "case4").unwrap();
        assert_eq!(net.n_buses(), 4);
        assert_eq!(net.children(2).unwrap(), &[3, 4]);
        assert!((loads[1].p0 - 0.01).abs() < 1e-15);
        assert!((loads[3].q0 - 0.008).abs() < 1e-15);
        assert_eq!(net.bases(), Bases::new(10.0, 12.66));
        let br = net.upstream_branch(3).unwrap().unwrap();
        assert_eq!((br.r, br.x), (0.0308, 0.0157));
    }

    #[test]
    fn matpower_errors() {
        let no_base = MPC.replace("mpc.baseMVA = 10;", "");
        assert_eq!(parse_case_str(&no_base, "m").unwrap_err().kind(), "UnitAmbiguity");
        let bad_ref = MPC.replace("\t2\t4\t0.0228", "\t2\t9\t0.0228");
        assert_eq!(parse_case_str(&bad_ref, "m").unwrap_err().kind(), "ParseError");
        let slack = MPC
            .replace("\t1\t3\t0", "\t1\t1\t0")
            .replace("\t4\t1\t0.12", "\t4\t3\t0.12");
        assert_eq!(parse_case_str(&slack, "m").unwrap_err().kind(), "ParseError");
    }
}
