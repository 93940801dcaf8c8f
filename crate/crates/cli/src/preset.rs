//! Parameter presets for the four benchmark datasets.
//!
//! `*-optimal` carries the tuned k / threshold / gamma per dataset; `*-poor`
//! keeps k and gamma but swaps in a deliberately bad threshold.

use hullknn::DataFormat;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub format: DataFormat,
    pub file: &'static str,
    pub k: usize,
    pub threshold: f64,
    pub gamma: f64,
}

const fn preset(
    name: &'static str,
    format: DataFormat,
    file: &'static str,
    k: usize,
    threshold: f64,
    gamma: f64,
) -> Preset {
    Preset {
        name,
        format,
        file,
        k,
        threshold,
        gamma,
    }
}

pub const PRESETS: [Preset; 8] = [
    preset(
        "haberman-optimal",
        DataFormat::Haberman,
        "haberman.data",
        15,
        1.75,
        1e-3,
    ),
    preset(
        "banknote-optimal",
        DataFormat::Banknote,
        "data_banknote_authentication.txt",
        1,
        23.0,
        1e-3,
    ),
    preset(
        "iris-optimal",
        DataFormat::Iris,
        "iris.data",
        10,
        21.0,
        0.25,
    ),
    preset(
        "seeds-optimal",
        DataFormat::Seeds,
        "seeds_dataset.txt",
        5,
        35.0,
        0.143,
    ),
    preset(
        "haberman-poor",
        DataFormat::Haberman,
        "haberman.data",
        15,
        2.5,
        1e-3,
    ),
    preset(
        "banknote-poor",
        DataFormat::Banknote,
        "data_banknote_authentication.txt",
        1,
        12.0,
        1e-3,
    ),
    preset("iris-poor", DataFormat::Iris, "iris.data", 10, 15.0, 0.25),
    preset(
        "seeds-poor",
        DataFormat::Seeds,
        "seeds_dataset.txt",
        5,
        20.0,
        0.143,
    ),
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haberman_optimal_values() {
        let p = find("haberman-optimal").unwrap();
        assert_eq!((p.k, p.threshold, p.gamma), (15, 1.75, 1e-3));
        assert_eq!(p.format, DataFormat::Haberman);
    }

    #[test]
    fn poor_presets_keep_k_and_gamma() {
        for ds in ["haberman", "banknote", "iris", "seeds"] {
            let good = find(&format!("{ds}-optimal")).unwrap();
            let bad = find(&format!("{ds}-poor")).unwrap();
            assert_eq!(
                (good.k, good.gamma, good.format),
                (bad.k, bad.gamma, bad.format)
            );
            assert_ne!(good.threshold, bad.threshold);
        }
        assert_eq!(find("seeds-poor").unwrap().threshold, 20.0);
        assert!(find("wine-optimal").is_none());
    }
}
