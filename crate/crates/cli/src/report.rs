//! Rendering of command results as JSON or CSV.
//!
//! CSV cells never contain commas: root sets are written `i:j;i:j` (`-` when empty), values
//! `φ` as `v;v`, coordinates as space-separated digits and cyclotomic values as `c0+c1*z+…`.

use serde::Serialize;

use superchar_core::orbits::{self, OrbitPartition, OrbitRecord, Side};
use superchar_core::roots::count_superclasses;
use superchar_core::superchar::{verify_theory, HAction, Theory, VerifyOptions};
use superchar_core::{FormType, RookPlacement, Sylow};

type Result<T> = std::result::Result<T, superchar_core::Error>;

#[derive(Serialize)]
struct Header {
    #[serde(rename = "type")]
    kind: FormType,
    n: usize,
    p: u32,
}

fn header(sylow: &Sylow) -> Header {
    Header {
        kind: sylow.tag().kind,
        n: sylow.tag().n,
        p: sylow.p(),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn roots_cell(pl: Option<&RookPlacement>) -> (String, String) {
    match pl {
        None => ("none".into(), "none".into()),
        Some(pl) if pl.is_empty() => ("-".into(), "-".into()),
        Some(pl) => (
            pl.roots.iter().map(|r| format!("{}:{}", r.row, r.col)).collect::<Vec<_>>().join(";"),
            pl.phi.iter().map(u32::to_string).collect::<Vec<_>>().join(";"),
        ),
    }
}

fn coords_cell(coords: &[u32]) -> String {
    coords.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

pub fn count(sylow: &Sylow, as_csv: bool) -> String {
    let count = count_superclasses(sylow.tag(), sylow.p());
    if as_csv {
        let h = header(sylow);
        return csv(&["type", "n", "p", "count"], [vec![h.kind.to_string(), h.n.to_string(), h.p.to_string(), count.to_string()]]);
    }
    #[derive(Serialize)]
    struct Out {
        #[serde(flatten)]
        header: Header,
        count: u128,
    }
    json(&Out {
        header: header(sylow),
        count,
    })
}

#[derive(Serialize)]
struct OrbitEntry<'a> {
    #[serde(flatten)]
    record: &'a OrbitRecord,
    representative: Vec<u32>,
}

fn partition_report(sylow: &Sylow, part: &OrbitPartition, key: &str, as_csv: bool) -> (String, usize) {
    let missing = part.violations().count();
    let entries: Vec<OrbitEntry> = part
        .orbits
        .iter()
        .map(|o| OrbitEntry {
            record: o,
            representative: sylow.coords_from_index(o.representative),
        })
        .collect();
    if as_csv {
        let rows = entries.iter().map(|e| {
            let (d, phi) = roots_cell(e.record.canonical.as_ref());
            vec![d, phi, e.record.size.to_string(), e.record.rook_members.to_string(), coords_cell(&e.representative)]
        });
        return (csv(&["D", "phi", "size", "rook_members", "representative"], rows), missing);
    }
    let mut value = serde_json::to_value(header(sylow)).expect("header serialises");
    value[key] = serde_json::to_value(&entries).expect("orbits serialise");
    (json(&value), missing)
}

/// Superclasses, read off the `𝒢`-orbits on `U` through the Springer map.
pub fn classify(sylow: &Sylow, budget: u128, as_csv: bool) -> Result<(String, usize)> {
    let part = orbits::group_partition(sylow, budget)?;
    Ok(partition_report(sylow, &part, "superclasses", as_csv))
}

pub fn dual_orbits(sylow: &Sylow, budget: u128, as_csv: bool) -> Result<(String, usize)> {
    let part = orbits::partition(sylow, Side::Dual, budget)?;
    Ok(partition_report(sylow, &part, "orbits", as_csv))
}

pub fn table(sylow: &Sylow, budget: u128, as_csv: bool) -> Result<(String, usize)> {
    let theory = Theory::build(sylow, budget, HAction::default())?;
    let missing = theory.lie.violations().count();
    let table = theory.table();
    if as_csv {
        let mut head = vec!["D".to_string(), "phi".to_string(), "degree".to_string()];
        for sc in &table.superclasses {
            let (d, phi) = roots_cell(sc.placement.as_ref());
            head.push(format!("{d}|{phi}"));
        }
        let head_refs: Vec<&str> = head.iter().map(String::as_str).collect();
        let rows = table.supercharacters.iter().zip(&table.values).map(|(ch, row)| {
            let (d, phi) = roots_cell(Some(&ch.placement));
            let mut cells = vec![d, phi, ch.degree.map_or("none".into(), |x| x.to_string())];
            cells.extend(row.iter().map(|v| v.as_ref().map_or("none".into(), |v| v.to_string())));
            cells
        });
        return Ok((csv(&head_refs, rows), missing));
    }
    let mut value = serde_json::to_value(header(sylow)).expect("header serialises");
    let body = serde_json::to_value(&table).expect("table serialises");
    for key in ["superclasses", "supercharacters", "values"] {
        value[key] = body[key].clone();
    }
    Ok((json(&value), missing))
}

/// Returns the rendered report and the names of failed checks.
pub fn verify(sylow: &Sylow, options: VerifyOptions, as_csv: bool) -> Result<(String, Vec<String>)> {
    let report = verify_theory(sylow, options)?;
    let failed: Vec<String> = report.failed_checks().into_iter().map(String::from).collect();
    if as_csv {
        let rows = report.checks.iter().map(|c| {
            vec![
                c.name.clone(),
                if c.passed { "pass" } else { "fail" }.to_string(),
                c.checked.to_string(),
                c.failures.to_string(),
            ]
        });
        return Ok((csv(&["check", "status", "checked", "failures"], rows), failed));
    }
    Ok((json(&report), failed))
}
