//! Regenerates `data/sample_faostat.csv`, the bundled synthetic dataset.
//!
//! The file mimics the FAOSTAT normalized bulk layout (one row per
//! area/item/element/year) over 1961-2017, with smooth upward trends plus a
//! mild deterministic wobble. Run from the workspace root:
//!
//! ```text
//! cargo run -p fuzzycast --example generate_sample_data
//! ```

use std::fs;

use fuzzycast::rng::SplitMix64;

struct ElementSpec {
    element: &'static str,
    element_code: u32,
    unit: &'static str,
    /// (item, item_code, 1961 base level, yearly growth rate)
    items: &'static [(&'static str, u32, f64, f64)],
}

const ELEMENTS: [ElementSpec; 7] = [
    ElementSpec {
        element: "Live Animals",
        element_code: 5111,
        unit: "head",
        items: &[
            ("Cattle", 866, 4.2e6, 0.014),
            ("Sheep", 976, 2.6e7, 0.011),
            ("Chickens", 1057, 3.8e7, 0.034),
        ],
    },
    ElementSpec {
        element: "Animals Slaughtered",
        element_code: 5320,
        unit: "head",
        items: &[
            ("Cattle", 866, 1.1e6, 0.016),
            ("Sheep", 976, 9.5e6, 0.012),
            ("Chickens", 1057, 2.4e7, 0.038),
        ],
    },
    ElementSpec {
        element: "Livestock Yield",
        element_code: 5417,
        unit: "hg/An",
        items: &[
            ("Cattle", 866, 1350.0, 0.009),
            ("Sheep", 976, 420.0, 0.006),
            ("Chickens", 1057, 86.0, 0.012),
        ],
    },
    ElementSpec {
        element: "Livestock Production",
        element_code: 5510,
        unit: "tonnes",
        items: &[
            ("Cattle", 866, 2.1e7, 0.019),
            ("Sheep", 976, 1.6e7, 0.014),
            ("Chickens", 1057, 2.8e7, 0.036),
        ],
    },
    ElementSpec {
        element: "Agricultural Yield",
        element_code: 5419,
        unit: "hg/ha",
        items: &[
            ("Wheat", 15, 9200.0, 0.016),
            ("Barley", 44, 8100.0, 0.013),
            ("Rice", 27, 26500.0, 0.011),
        ],
    },
    ElementSpec {
        element: "Losses",
        element_code: 5016,
        unit: "tonnes",
        items: &[
            ("Wheat", 15, 2.4e5, 0.014),
            ("Barley", 44, 9.0e4, 0.012),
            ("Rice", 27, 7.5e4, 0.015),
        ],
    },
    ElementSpec {
        element: "Agricultural Production",
        element_code: 5511,
        unit: "tonnes",
        items: &[
            ("Wheat", 15, 2.9e6, 0.020),
            ("Barley", 44, 9.8e5, 0.016),
            ("Rice", 27, 1.2e6, 0.018),
        ],
    },
];

const FIRST_YEAR: i32 = 1961;
const LAST_YEAR: i32 = 2017;

fn main() {
    let mut rng = SplitMix64::new(20_170_101);
    let mut out = String::new();
    out.push_str(
        "Area Code,Area,Item Code,Item,Element Code,Element,Year Code,Year,Unit,Value,Flag\n",
    );
    for spec in &ELEMENTS {
        for (item, item_code, base, growth) in spec.items {
            // Per-series wobble so the items are not perfectly correlated.
            let phase = rng.range_f64(0.0, std::f64::consts::TAU);
            let period = rng.range_f64(6.0, 11.0);
            let amplitude = rng.range_f64(0.015, 0.035);
            for year in FIRST_YEAR..=LAST_YEAR {
                let t = (year - FIRST_YEAR) as f64;
                let trend = base * (1.0 + growth).powf(t);
                let wobble = 1.0 + amplitude * (std::f64::consts::TAU * t / period + phase).sin();
                let jitter = 1.0 + rng.range_f64(-0.004, 0.004);
                let value = (trend * wobble * jitter).round().max(0.0);
                out.push_str(&format!(
                    "143,Testland,{item_code},{item},{element_code},{element},{year},{year},{unit},{value},E\n",
                    element_code = spec.element_code,
                    element = spec.element,
                    unit = spec.unit,
                ));
            }
        }
    }
    fs::write("data/sample_faostat.csv", out).expect("write sample dataset");
    println!("wrote data/sample_faostat.csv");
}
