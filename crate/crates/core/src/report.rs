//! Per-mesh structure statistics in the column vocabulary of the structure
//! table, as JSON or CSV.

use serde::{Serialize, Serializer};

use crate::io::fmt_g9;

fn g9<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(fmt_g9(*x).parse().unwrap_or(*x))
}

/// Wall-clock seconds per stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    #[serde(rename = "T_GS", serialize_with = "g9")]
    pub graph: f64,
    #[serde(rename = "T_GB", serialize_with = "g9")]
    pub complex: f64,
    #[serde(rename = "T_VSGW", serialize_with = "g9")]
    pub wireframe: f64,
    #[serde(rename = "T_GSH", serialize_with = "g9")]
    pub sheets: f64,
    #[serde(rename = "T_GSH*", serialize_with = "g9")]
    pub decomposition: f64,
}

impl Timings {
    fn values(&self) -> [f64; 5] {
        [
            self.graph,
            self.complex,
            self.wireframe,
            self.sheets,
            self.decomposition,
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureReport {
    pub mesh: String,
    #[serde(rename = "|C|")]
    pub num_cells: usize,
    #[serde(serialize_with = "g9")]
    pub hex_ratio: f64,
    #[serde(rename = "|C_B|")]
    pub num_components: usize,
    #[serde(serialize_with = "g9")]
    pub hexbc_ratio: f64,
    pub n_sheets: usize,
    pub n_t1: usize,
    pub n_t2: usize,
    pub n_t3: usize,
    pub n_subsheets_largest_t3: usize,
    pub timings: Timings,
    pub non_conforming: bool,
}

pub const CSV_COLUMNS: [&str; 16] = [
    "mesh",
    "|C|",
    "hex_ratio",
    "|C_B|",
    "hexbc_ratio",
    "n_sheets",
    "n_t1",
    "n_t2",
    "n_t3",
    "n_subsheets_largest_t3",
    "T_GS",
    "T_GB",
    "T_VSGW",
    "T_GSH",
    "T_GSH*",
    "non_conforming",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl StructureReport {
    /// Copy with all timings zeroed, for determinism checks.
    pub fn without_timings(&self) -> Self {
        StructureReport {
            timings: Timings::default(),
            ..self.clone()
        }
    }

    fn csv_fields(&self) -> Vec<String> {
        let mut out = vec![
            self.mesh.clone(),
            self.num_cells.to_string(),
            fmt_g9(self.hex_ratio),
            self.num_components.to_string(),
            fmt_g9(self.hexbc_ratio),
            self.n_sheets.to_string(),
            self.n_t1.to_string(),
            self.n_t2.to_string(),
            self.n_t3.to_string(),
            self.n_subsheets_largest_t3.to_string(),
        ];
        out.extend(self.timings.values().iter().map(|&t| fmt_g9(t)));
        out.push(self.non_conforming.to_string());
        out
    }
}

/// Field-wise `b - a`; `non_conforming` is true when the two differ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportDelta {
    #[serde(rename = "|C|")]
    pub num_cells: i64,
    #[serde(serialize_with = "g9")]
    pub hex_ratio: f64,
    #[serde(rename = "|C_B|")]
    pub num_components: i64,
    #[serde(serialize_with = "g9")]
    pub hexbc_ratio: f64,
    pub n_sheets: i64,
    pub n_t1: i64,
    pub n_t2: i64,
    pub n_t3: i64,
    pub n_subsheets_largest_t3: i64,
    pub timings: Timings,
    pub non_conforming: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub a: StructureReport,
    pub b: StructureReport,
    pub delta: ReportDelta,
}

pub fn compare_reports(a: &StructureReport, b: &StructureReport) -> Comparison {
    let d = |x: usize, y: usize| y as i64 - x as i64;
    let ta = a.timings.values();
    let tb = b.timings.values();
    let dt: Vec<f64> = tb.iter().zip(ta).map(|(y, x)| y - x).collect();
    Comparison {
        a: a.clone(),
        b: b.clone(),
        delta: ReportDelta {
            num_cells: d(a.num_cells, b.num_cells),
            hex_ratio: b.hex_ratio - a.hex_ratio,
            num_components: d(a.num_components, b.num_components),
            hexbc_ratio: b.hexbc_ratio - a.hexbc_ratio,
            n_sheets: d(a.n_sheets, b.n_sheets),
            n_t1: d(a.n_t1, b.n_t1),
            n_t2: d(a.n_t2, b.n_t2),
            n_t3: d(a.n_t3, b.n_t3),
            n_subsheets_largest_t3: d(a.n_subsheets_largest_t3, b.n_subsheets_largest_t3),
            timings: Timings {
                graph: dt[0],
                complex: dt[1],
                wireframe: dt[2],
                sheets: dt[3],
                decomposition: dt[4],
            },
            non_conforming: a.non_conforming != b.non_conforming,
        },
    }
}

impl ReportDelta {
    fn csv_fields(&self) -> Vec<String> {
        let mut out = vec![
            "delta".to_string(),
            self.num_cells.to_string(),
            fmt_g9(self.hex_ratio),
            self.num_components.to_string(),
            fmt_g9(self.hexbc_ratio),
            self.n_sheets.to_string(),
            self.n_t1.to_string(),
            self.n_t2.to_string(),
            self.n_t3.to_string(),
            self.n_subsheets_largest_t3.to_string(),
        ];
        out.extend(self.timings.values().iter().map(|&t| fmt_g9(t)));
        out.push(self.non_conforming.to_string());
        out
    }
}

fn csv_bytes(rows: &[Vec<String>], header: &[&str]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in rows {
        w.write_record(r).expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report serializes");
    out.push(b'\n');
    out
}

/// One JSON array or one CSV table; one row per report.
pub fn write_reports(reports: &[StructureReport], format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => json_bytes(&reports),
        ReportFormat::Csv => {
            let rows: Vec<Vec<String>> = reports.iter().map(|r| r.csv_fields()).collect();
            csv_bytes(&rows, &CSV_COLUMNS)
        }
    }
}

/// A single report as a JSON object or a one-row CSV table.
pub fn write_report(report: &StructureReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => json_bytes(report),
        ReportFormat::Csv => write_reports(std::slice::from_ref(report), format),
    }
}

/// Rows `a`, `b`, `delta`. CSV prefixes a `row` column.
pub fn write_comparison(cmp: &Comparison, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => json_bytes(cmp),
        ReportFormat::Csv => {
            let mut header = vec!["row"];
            header.extend(CSV_COLUMNS);
            let tag = |t: &str, mut f: Vec<String>| {
                f.insert(0, t.to_string());
                f
            };
            let rows = vec![
                tag("a", cmp.a.csv_fields()),
                tag("b", cmp.b.csv_fields()),
                tag("delta", cmp.delta.csv_fields()),
            ];
            csv_bytes(&rows, &header)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> StructureReport {
        StructureReport {
            mesh: "grid-3".into(),
            num_cells: 27,
            hex_ratio: 1.0,
            num_components: 1,
            hexbc_ratio: 1.0,
            n_sheets: 9,
            n_t1: 0,
            n_t2: 0,
            n_t3: 0,
            n_subsheets_largest_t3: 0,
            timings: Timings {
                graph: 0.001234567891,
                ..Timings::default()
            },
            non_conforming: false,
        }
    }

    #[test]
    fn json_keys_follow_the_table() {
        let text = String::from_utf8(write_report(&sample(), ReportFormat::Json)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["|C|"], 27);
        assert_eq!(v["|C_B|"], 1);
        assert_eq!(v["hex_ratio"], 1.0);
        assert_eq!(v["timings"]["T_GS"], 0.00123456789);
        assert!(v["timings"].get("T_GSH*").is_some());
    }

    #[test]
    fn csv_column_order_is_fixed() {
        let text = String::from_utf8(write_report(&sample(), ReportFormat::Csv)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "grid-3,27,1,1,1,9,0,0,0,0,0.00123456789,0,0,0,0,false"
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn self_comparison_has_zero_deltas() {
        let r = sample();
        let c = compare_reports(&r, &r);
        assert_eq!(c.delta.num_cells, 0);
        assert_eq!(c.delta.num_components, 0);
        assert_eq!(c.delta.hex_ratio, 0.0);
        assert!(!c.delta.non_conforming);
        let csv = String::from_utf8(write_comparison(&c, ReportFormat::Csv)).unwrap();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv
            .lines()
            .nth(3)
            .unwrap()
            .starts_with("delta,delta,0,0,0,0,0"));
    }
}
