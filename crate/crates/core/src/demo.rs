//! Bundled demo catalog.
//!
//! The 814-report injury dataset behind the published attribute table is
//! proprietary, so this crate ships a synthetic stand-in: attribute names,
//! report counts, and exposure percentages are transcribed from the
//! published table, while the per-level severity splits are back-filled.
//! The back-fill was calibrated offline: a five-level demo severity scale
//! was chosen together with integer severity splits (each summing to the
//! attribute's report count) such that every attribute's computed relative
//! risk, rounded up to the nearest integer, reproduces the published value
//! for both the real-outcome and worst-outcome bases. A handful of
//! attributes whose published value is a starred zero display as 1 instead,
//! since any nonzero risk rounds up to at least 1; those rows carry the
//! minimal all-level-1 split.
//!
//! The demo scale lives in the catalog itself (CSV scale pragma), so files
//! written by [`demo_catalog`] re-parse with the correct calibration. None
//! of this affects the default [`SeverityScale`] used everywhere else.

use crate::datamodel::{AttributeCatalog, AttributeRecord, SeverityScale, SEVERITY_LEVELS};

/// Severity scores the demo catalog is calibrated against.
pub const DEMO_SEVERITY_SCORES: [f64; SEVERITY_LEVELS] = [0.039, 0.070, 0.230, 1.205, 6.317];

/// name, report count, exposure percent, real split, worst split
type DemoRow = (&'static str, u32, u32, [u32; 5], [u32; 5]);

const DEMO_ROWS: [DemoRow; 77] = [
    ("concrete", 29, 41, [16, 12, 0, 1, 0], [0, 4, 12, 9, 4]),
    ("confined workspace", 21, 2, [10, 10, 0, 1, 0], [14, 2, 0, 5, 0]),
    ("crane", 16, 12, [5, 7, 3, 1, 0], [0, 9, 0, 7, 0]),
    ("door", 17, 21, [9, 6, 1, 1, 0], [1, 4, 4, 3, 5]),
    ("sharp edge", 8, 38, [5, 2, 1, 0, 0], [5, 1, 1, 1, 0]),
    ("formwork", 22, 5, [1, 17, 3, 1, 0], [5, 8, 5, 4, 0]),
    ("grinding", 16, 16, [8, 3, 5, 0, 0], [4, 3, 6, 3, 0]),
    ("heat source", 11, 20, [2, 9, 0, 0, 0], [1, 5, 4, 1, 0]),
    ("heavy material/tool", 29, 30, [0, 22, 7, 0, 0], [6, 3, 7, 2, 11]),
    ("heavy vehicle", 12, 12, [3, 5, 4, 0, 0], [0, 2, 1, 4, 5]),
    ("ladder", 23, 14, [2, 18, 3, 0, 0], [2, 10, 7, 4, 0]),
    ("light vehicle", 31, 59, [19, 4, 7, 1, 0], [10, 4, 0, 7, 10]),
    ("lumber", 69, 14, [44, 19, 3, 3, 0], [35, 11, 8, 15, 0]),
    ("machinery", 40, 8, [7, 22, 10, 1, 0], [0, 0, 0, 0, 40]),
    ("manlift", 8, 8, [3, 0, 5, 0, 0], [0, 5, 0, 3, 0]),
    ("object at height", 14, 50, [1, 8, 5, 0, 0], [0, 0, 0, 4, 10]),
    ("piping", 74, 38, [60, 3, 9, 2, 0], [19, 15, 7, 31, 2]),
    ("scaffold", 91, 33, [16, 55, 20, 0, 0], [5, 22, 56, 8, 0]),
    ("stairs", 28, 41, [11, 14, 2, 1, 0], [11, 7, 3, 7, 0]),
    ("steel/steel sections", 112, 35, [15, 72, 25, 0, 0], [15, 17, 0, 80, 0]),
    ("rebar", 33, 4, [24, 6, 2, 1, 0], [1, 8, 20, 4, 0]),
    ("unpowered transporter", 13, 9, [0, 6, 7, 0, 0], [0, 2, 3, 3, 5]),
    ("valve", 24, 27, [6, 13, 5, 0, 0], [13, 1, 7, 3, 0]),
    ("welding", 25, 22, [15, 5, 5, 0, 0], [6, 1, 15, 3, 0]),
    ("wire", 30, 43, [26, 0, 4, 0, 0], [20, 0, 5, 5, 0]),
    ("working at height", 73, 40, [1, 60, 12, 0, 0], [25, 4, 37, 7, 0]),
    ("wkg below elev. wksp/mat.", 7, 17, [2, 5, 0, 0, 0], [0, 0, 5, 2, 0]),
    ("forklift", 11, 9, [0, 11, 0, 0, 0], [4, 0, 0, 2, 5]),
    ("hand size pieces", 38, 47, [29, 7, 1, 1, 0], [0, 16, 9, 8, 5]),
    ("hazardous substance", 33, 1, [14, 0, 18, 1, 0], [0, 17, 0, 7, 9]),
    ("adverse low temps", 33, 3, [19, 12, 1, 1, 0], [6, 10, 13, 4, 0]),
    ("mud", 6, 6, [2, 3, 1, 0, 0], [1, 0, 5, 0, 0]),
    ("poor visibility", 3, 23, [1, 1, 1, 0, 0], [0, 1, 2, 0, 0]),
    ("powered tool", 32, 27, [19, 10, 2, 1, 0], [9, 12, 0, 11, 0]),
    ("slippery surface", 32, 25, [8, 23, 0, 1, 0], [10, 15, 0, 7, 0]),
    ("small particle", 96, 31, [45, 31, 20, 0, 0], [10, 15, 56, 15, 0]),
    ("unpowered tool", 102, 44, [0, 82, 20, 0, 0], [18, 8, 10, 52, 14]),
    ("electricity", 1, 33, [1, 0, 0, 0, 0], [0, 0, 1, 0, 0]),
    ("uneven surface", 33, 32, [13, 17, 2, 1, 0], [6, 1, 6, 17, 3]),
    ("unstable support/surface", 3, 32, [2, 1, 0, 0, 0], [1, 0, 2, 0, 0]),
    ("wind", 29, 37, [5, 23, 1, 0, 0], [10, 0, 18, 1, 0]),
    ("improper body position", 7, 25, [1, 5, 1, 0, 0], [1, 0, 6, 0, 0]),
    ("imp. procedure/inattention", 13, 16, [1, 8, 4, 0, 0], [6, 6, 0, 0, 1]),
    ("imp. security of materials", 78, 12, [40, 7, 31, 0, 0], [13, 1, 3, 52, 9]),
    ("insect", 19, 18, [15, 1, 3, 0, 0], [7, 2, 9, 1, 0]),
    ("no/improper PPE", 3, 67, [3, 0, 0, 0, 0], [1, 1, 1, 0, 0]),
    ("object on the floor", 41, 43, [16, 17, 8, 0, 0], [32, 1, 7, 0, 1]),
    ("lifting/pulling/handling", 141, 31, [45, 55, 41, 0, 0], [26, 9, 9, 94, 3]),
    ("cable tray", 9, 27, [0, 7, 2, 0, 0], [2, 5, 0, 2, 0]),
    ("cable", 8, 33, [8, 0, 0, 0, 0], [2, 4, 2, 0, 0]),
    ("chipping", 4, 16, [4, 0, 0, 0, 0], [1, 1, 2, 0, 0]),
    ("concrete liquid", 8, 41, [3, 4, 1, 0, 0], [2, 0, 6, 0, 0]),
    ("conduit", 11, 31, [0, 9, 2, 0, 0], [5, 2, 1, 3, 0]),
    ("congested workspace", 2, 32, [2, 0, 0, 0, 0], [0, 2, 0, 0, 0]),
    ("dunnage", 2, 16, [2, 0, 0, 0, 0], [0, 0, 2, 0, 0]),
    ("grout", 3, 41, [0, 3, 0, 0, 0], [0, 3, 0, 0, 0]),
    ("guardrail handrail", 16, 40, [1, 13, 2, 0, 0], [7, 2, 6, 1, 0]),
    ("job trailer", 2, 59, [2, 0, 0, 0, 0], [0, 1, 1, 0, 0]),
    ("stud", 4, 41, [2, 2, 0, 0, 0], [0, 0, 3, 1, 0]),
    ("spool", 9, 33, [4, 5, 0, 0, 0], [3, 4, 0, 2, 0]),
    ("stripping", 12, 22, [7, 0, 5, 0, 0], [2, 3, 5, 2, 0]),
    ("tank", 16, 31, [12, 0, 4, 0, 0], [3, 0, 6, 2, 5]),
    ("drill", 16, 43, [5, 5, 6, 0, 0], [0, 1, 1, 10, 4]),
    ("bolt", 36, 41, [16, 16, 4, 0, 0], [21, 9, 3, 2, 1]),
    ("cleaning", 22, 56, [5, 16, 0, 1, 0], [9, 5, 4, 4, 0]),
    ("hammer", 33, 50, [2, 31, 0, 0, 0], [11, 4, 14, 4, 0]),
    ("hose", 11, 41, [2, 7, 2, 0, 0], [4, 4, 1, 2, 0]),
    ("nail", 15, 50, [14, 0, 0, 1, 0], [6, 3, 3, 3, 0]),
    ("screw", 7, 50, [7, 0, 0, 0, 0], [2, 3, 2, 0, 0]),
    ("slag", 10, 10, [4, 5, 1, 0, 0], [5, 1, 2, 2, 0]),
    ("spark", 1, 12, [0, 0, 1, 0, 0], [0, 0, 0, 1, 0]),
    ("wrench", 23, 39, [16, 3, 4, 0, 0], [7, 14, 0, 1, 1]),
    ("exiting/transitioning", 25, 49, [16, 0, 9, 0, 0], [4, 5, 12, 4, 0]),
    ("splinter/sliver", 9, 44, [9, 0, 0, 0, 0], [4, 4, 1, 0, 0]),
    ("working overhead", 5, 40, [5, 0, 0, 0, 0], [0, 1, 4, 0, 0]),
    ("repetitive motion", 2, 51, [2, 0, 0, 0, 0], [1, 0, 1, 0, 0]),
    ("imp. security of tools", 24, 22, [14, 2, 8, 0, 0], [1, 1, 9, 3, 10]),
];

/// Build the bundled 77-attribute demo catalog.
pub fn demo_catalog() -> AttributeCatalog {
    let scale = SeverityScale::new(DEMO_SEVERITY_SCORES).expect("demo scale is valid");
    let records = DEMO_ROWS
        .iter()
        .map(|&(name, n, pct, real, worst)| {
            AttributeRecord::new(name, f64::from(pct) / 100.0, real, worst, n)
                .expect("demo rows satisfy the record invariants")
        })
        .collect();
    AttributeCatalog::new(records, scale).expect("demo catalog is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riskcore::{catalog_relative_risks, Basis};

    #[test]
    fn has_77_unique_attributes() {
        let cat = demo_catalog();
        assert_eq!(cat.len(), 77);
    }

    /// Published (real, worst) display values for every attribute; starred
    /// zeros in the source table display as 1 here (minimal nonzero risk).
    const EXPECTED_DISPLAY: [(&str, u64, u64); 77] = [
        ("concrete", 7, 96),
        ("confined workspace", 115, 336),
        ("crane", 22, 76),
        ("door", 11, 174),
        ("sharp edge", 2, 5),
        ("formwork", 63, 135),
        ("grinding", 11, 34),
        ("heat source", 4, 13),
        ("heavy material/tool", 11, 247),
        ("heavy vehicle", 12, 307),
        ("ladder", 15, 52),
        ("light vehicle", 7, 123),
        ("lumber", 53, 158),
        ("machinery", 67, 3159),
        ("manlift", 16, 50),
        ("object at height", 4, 136),
        ("piping", 19, 141),
        ("scaffold", 28, 74),
        ("stairs", 8, 25),
        ("steel/steel sections", 33, 281),
        ("rebar", 76, 251),
        ("unpowered transporter", 23, 401),
        ("valve", 9, 22),
        ("welding", 10, 34),
        ("wire", 5, 19),
        ("working at height", 18, 46),
        ("wkg below elev. wksp/mat.", 3, 21),
        ("forklift", 9, 380),
        ("hand size pieces", 7, 95),
        ("hazardous substance", 590, 6648),
        ("adverse low temps", 101, 292),
        ("mud", 9, 20),
        ("poor visibility", 2, 3),
        ("powered tool", 12, 54),
        ("slippery surface", 13, 40),
        ("small particle", 28, 105),
        ("unpowered tool", 24, 352),
        ("electricity", 1, 1),
        ("uneven surface", 11, 129),
        ("unstable support/surface", 1, 2),
        ("wind", 6, 16),
        ("improper body position", 3, 6),
        ("imp. procedure/inattention", 10, 44),
        ("imp. security of materials", 77, 1007),
        ("insect", 8, 21),
        ("no/improper PPE", 1, 1),
        ("object on the floor", 9, 22),
        ("lifting/pulling/handling", 49, 439),
        ("cable tray", 4, 11),
        ("cable", 1, 3),
        ("chipping", 1, 4),
        ("concrete liquid", 2, 4),
        ("conduit", 4, 14),
        ("congested workspace", 1, 1),
        ("dunnage", 1, 3),
        ("grout", 1, 1),
        ("guardrail handrail", 4, 8),
        ("job trailer", 1, 1),
        ("stud", 1, 5),
        ("spool", 2, 9),
        ("stripping", 7, 18),
        ("tank", 5, 115),
        ("drill", 5, 88),
        ("bolt", 7, 27),
        ("cleaning", 5, 12),
        ("hammer", 5, 18),
        ("hose", 3, 8),
        ("nail", 4, 10),
        ("screw", 1, 2),
        ("slag", 8, 32),
        ("spark", 2, 11),
        ("wrench", 5, 23),
        ("exiting/transitioning", 6, 17),
        ("splinter/sliver", 1, 2),
        ("working overhead", 1, 3),
        ("repetitive motion", 1, 1),
        ("imp. security of tools", 12, 314),
    ];

    #[test]
    fn displayed_relative_risks_match_reference_table() {
        let cat = demo_catalog();
        let real = catalog_relative_risks(&cat, Basis::Real);
        let worst = catalog_relative_risks(&cat, Basis::Worst);
        for &(name, want_real, want_worst) in &EXPECTED_DISPLAY {
            let i = cat.index_of(name).unwrap_or_else(|| panic!("missing {name}"));
            assert_eq!(real.display_values()[i], want_real, "{name} real");
            assert_eq!(worst.display_values()[i], want_worst, "{name} worst");
        }
    }
}
