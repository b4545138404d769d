//! Config file parsing, canonical defaults, and parameter-path mutation.
//!
//! Config files are flat `key = value` text. Power-valued fields accept unit
//! suffixes (`20dBm`, `1mW`, `3uW`, `1e-4W`; bare numbers are watts); list
//! fields are comma-separated. Keys have a canonical dotted form plus the
//! short symbol aliases listed in [`KEYS`]; the same names drive `--set`
//! overrides and sweep parameter paths (with `.N` indexing into lists).

use crate::energy::{EhModel, PowerUnit};
use crate::error::{Error, Result};
use crate::sysmodel::{dbm_to_watts, Geometry, NoiseSource, RisConfig, SystemConfig};

/// Canonical key and accepted aliases for every settable field.
pub const KEYS: &[(&str, &[&str])] = &[
    ("noise.sigma0", &["sigma0"]),
    ("noise.resistance_ratio", &["C", "resistance_ratio"]),
    ("geometry.tx_rx", &["d"]),
    ("geometry.tx_ris", &["d1"]),
    ("geometry.ris_rx", &["d2"]),
    ("geometry.interferer_ris", &["d1k"]),
    ("geometry.interferer_rx", &["dDk"]),
    ("geometry.pathloss_exponent", &["a"]),
    ("geometry.ris_height", &["H"]),
    ("geometry.direct_link_mean", &["mu_d"]),
    ("ris.total_elements", &["N"]),
    ("ris.eh_elements", &["N1"]),
    ("ris.quantization_bits", &["b"]),
    ("ris.element_power", &["E"]),
    ("ris.controller_power", &["E_con"]),
    ("ris.slot_duration", &["t"]),
    ("interferer_powers", &["P_k"]),
    ("noise_floor", &["N0"]),
    ("samples_per_symbol", &["M"]),
    ("repetitions", &["R"]),
    ("eh_model", &[]),
    ("eh.efficiency", &["eta"]),
    ("eh.a1", &[]),
    ("eh.a2", &[]),
    ("eh.a3", &[]),
    ("eh.unit", &[]),
    ("rx_power", &["P_rx"]),
    ("tx_power", &["P_tx"]),
];

/// Default scenario: the baseline every figure recipe starts from.
pub fn default_config() -> SystemConfig {
    SystemConfig {
        noise_source: NoiseSource::from_variance_bit0(dbm_to_watts(-10.0), 15.0),
        geometry: Geometry {
            tx_rx: 8.0,
            tx_ris: 3.0,
            ris_rx: 6.0,
            interferer_ris: vec![12.0, 14.0, 18.0, 20.0],
            interferer_rx: vec![18.0, 20.0, 22.0, 25.0],
            pathloss_exponent: 2.0,
            ris_height: None,
            direct_link_mean: 1.0,
        },
        ris: RisConfig {
            total_elements: 200,
            eh_elements: 125,
            quantization_bits: 2,
            element_power: 1e-3,
            controller_power: 50e-3,
            slot_duration: 1.0,
        },
        interferer_powers: vec![0.1; 4],
        noise_floor: dbm_to_watts(-100.0),
        samples_per_symbol: 15,
        repetitions: 5,
        eh_model: EhModel::Linear { efficiency: 0.9 },
        rx_power: 195e-3,
        tx_power: 1e-6,
    }
}

/// Parses a power value with an optional unit suffix into watts.
pub fn parse_power(text: &str) -> Result<f64> {
    let s = text.trim();
    let (num, to_watts): (&str, fn(f64) -> f64) = if let Some(v) = s.strip_suffix("dBm") {
        (v, dbm_to_watts)
    } else if let Some(v) = s.strip_suffix("mW") {
        (v, |x| x * 1e-3)
    } else if let Some(v) = s.strip_suffix("uW") {
        (v, |x| x * 1e-6)
    } else if let Some(v) = s.strip_suffix("nW") {
        (v, |x| x * 1e-9)
    } else if let Some(v) = s.strip_suffix('W') {
        (v, |x| x)
    } else {
        (s, |x| x)
    };
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid power value {text:?}")))?;
    Ok(to_watts(value))
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{key}: invalid number {value:?}")))
}

fn parse_u32(key: &str, value: &str) -> Result<u32> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{key}: invalid count {value:?}")))
}

fn parse_f64_list(key: &str, value: &str) -> Result<Vec<f64>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| parse_f64(key, v)).collect()
}

fn parse_power_list(key: &str, value: &str) -> Result<Vec<f64>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|v| parse_power(v).map_err(|e| Error::Parse(format!("{key}: {e}"))))
        .collect()
}

fn canonical_key(name: &str) -> Result<&'static str> {
    // list indexing: "interferer_powers.2" resolves on the base name
    let (base, _) = split_index(name);
    for (canonical, aliases) in KEYS {
        if *canonical == base || aliases.contains(&base) {
            return Ok(canonical);
        }
    }
    Err(Error::Parse(format!("unknown config key {name:?}")))
}

fn split_index(name: &str) -> (&str, Option<usize>) {
    if let Some((head, tail)) = name.rsplit_once('.') {
        if let Ok(idx) = tail.parse::<usize>() {
            return (head, Some(idx));
        }
    }
    (name, None)
}

fn set_list_value(key: &str, list: &mut Vec<f64>, index: Option<usize>, parsed: Vec<f64>) -> Result<()> {
    match index {
        None => {
            *list = parsed;
            Ok(())
        }
        Some(i) => {
            let [single] = parsed[..] else {
                return Err(Error::Parse(format!("{key}.{i}: expected a single value")));
            };
            let len = list.len();
            let slot = list
                .get_mut(i)
                .ok_or_else(|| Error::Parse(format!("{key}.{i}: index out of range (len {len})")))?;
            *slot = single;
            Ok(())
        }
    }
}

/// Applies one `key = value` assignment to a config in place. Accepts
/// canonical dotted names, short aliases, and `.N` list indexing; this is the
/// engine behind config files, `--set` overrides, and sweep paths.
pub fn set_by_path(cfg: &mut SystemConfig, name: &str, value: &str) -> Result<()> {
    let key = canonical_key(name.trim())?;
    let (_, index) = split_index(name.trim());
    let value = value.trim();
    match key {
        "noise.sigma0" => {
            let target = parse_power(value)?;
            let ns = &cfg.noise_source;
            cfg.noise_source.low_resistance =
                target / (4.0 * ns.boltzmann * ns.temperature * ns.bandwidth);
        }
        "noise.resistance_ratio" => cfg.noise_source.resistance_ratio = parse_f64(key, value)?,
        "geometry.tx_rx" => cfg.geometry.tx_rx = parse_f64(key, value)?,
        "geometry.tx_ris" => cfg.geometry.tx_ris = parse_f64(key, value)?,
        "geometry.ris_rx" => cfg.geometry.ris_rx = parse_f64(key, value)?,
        "geometry.interferer_ris" => {
            set_list_value(key, &mut cfg.geometry.interferer_ris, index, parse_f64_list(key, value)?)?
        }
        "geometry.interferer_rx" => {
            set_list_value(key, &mut cfg.geometry.interferer_rx, index, parse_f64_list(key, value)?)?
        }
        "geometry.pathloss_exponent" => cfg.geometry.pathloss_exponent = parse_f64(key, value)?,
        "geometry.ris_height" => {
            cfg.geometry.ris_height = if value.eq_ignore_ascii_case("none") {
                None
            } else {
                Some(parse_f64(key, value)?)
            }
        }
        "geometry.direct_link_mean" => cfg.geometry.direct_link_mean = parse_f64(key, value)?,
        "ris.total_elements" => cfg.ris.total_elements = parse_u32(key, value)?,
        "ris.eh_elements" => cfg.ris.eh_elements = parse_u32(key, value)?,
        "ris.quantization_bits" => cfg.ris.quantization_bits = parse_u32(key, value)?,
        "ris.element_power" => cfg.ris.element_power = parse_power(value)?,
        "ris.controller_power" => cfg.ris.controller_power = parse_power(value)?,
        "ris.slot_duration" => cfg.ris.slot_duration = parse_f64(key, value)?,
        "interferer_powers" => {
            set_list_value(key, &mut cfg.interferer_powers, index, parse_power_list(key, value)?)?
        }
        "noise_floor" => cfg.noise_floor = parse_power(value)?,
        "samples_per_symbol" => cfg.samples_per_symbol = parse_u32(key, value)?,
        "repetitions" => cfg.repetitions = parse_u32(key, value)?,
        "eh_model" => match value {
            "linear" => {
                if !matches!(cfg.eh_model, EhModel::Linear { .. }) {
                    cfg.eh_model = EhModel::Linear { efficiency: 0.9 };
                }
            }
            "nonlinear" => {
                if !matches!(cfg.eh_model, EhModel::NonLinear { .. }) {
                    cfg.eh_model = EhModel::nonlinear_default();
                }
            }
            other => return Err(Error::Parse(format!("eh_model: expected linear|nonlinear, got {other:?}"))),
        },
        "eh.efficiency" => match &mut cfg.eh_model {
            EhModel::Linear { efficiency } => *efficiency = parse_f64(key, value)?,
            EhModel::NonLinear { .. } => {
                return Err(Error::Parse("eh.efficiency: model is nonlinear; set eh_model=linear first".into()))
            }
        },
        "eh.a1" | "eh.a2" | "eh.a3" => match &mut cfg.eh_model {
            EhModel::NonLinear { a1, a2, a3, .. } => {
                let v = parse_f64(key, value)?;
                match key {
                    "eh.a1" => *a1 = v,
                    "eh.a2" => *a2 = v,
                    _ => *a3 = v,
                }
            }
            EhModel::Linear { .. } => {
                return Err(Error::Parse(format!("{key}: model is linear; set eh_model=nonlinear first")))
            }
        },
        "eh.unit" => match &mut cfg.eh_model {
            EhModel::NonLinear { unit, .. } => {
                *unit = match value {
                    "W" => PowerUnit::Watts,
                    "mW" => PowerUnit::Milliwatts,
                    other => return Err(Error::Parse(format!("eh.unit: expected W|mW, got {other:?}"))),
                }
            }
            EhModel::Linear { .. } => {
                return Err(Error::Parse("eh.unit: model is linear; set eh_model=nonlinear first".into()))
            }
        },
        "rx_power" => cfg.rx_power = parse_power(value)?,
        "tx_power" => cfg.tx_power = parse_power(value)?,
        _ => unreachable!("canonical_key covers all keys"),
    }
    Ok(())
}

/// Parses flat `key = value` text on top of the defaults. `#` starts a
/// comment; blank lines are skipped; later assignments win. `eh_model` lines
/// are applied before `eh.*` detail lines regardless of file order.
pub fn parse_config(text: &str) -> Result<SystemConfig> {
    let mut cfg = default_config();
    let mut assignments = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse(format!("line {}: expected key = value, got {line:?}", lineno + 1)));
        };
        assignments.push((key.trim().to_string(), value.trim().to_string()));
    }
    assignments.sort_by_key(|(k, _)| u8::from(k != "eh_model")); // stable: keeps file order otherwise
    for (key, value) in &assignments {
        set_by_path(&mut cfg, key, value)?;
    }
    Ok(cfg)
}

/// Canonical `(key, value)` listing of a config, SI units throughout.
pub fn canonical_entries(cfg: &SystemConfig) -> Vec<(String, String)> {
    let fmt = |x: f64| format!("{x:?}");
    let fmt_list = |xs: &[f64]| xs.iter().map(|&x| format!("{x:?}")).collect::<Vec<_>>().join(",");
    let mut out = vec![
        ("noise.sigma0".to_string(), fmt(cfg.sigma0_sq())),
        ("noise.resistance_ratio".to_string(), fmt(cfg.noise_source.resistance_ratio)),
        ("geometry.tx_rx".to_string(), fmt(cfg.geometry.tx_rx)),
        ("geometry.tx_ris".to_string(), fmt(cfg.geometry.tx_ris)),
        ("geometry.ris_rx".to_string(), fmt(cfg.geometry.ris_rx)),
        ("geometry.interferer_ris".to_string(), fmt_list(&cfg.geometry.interferer_ris)),
        ("geometry.interferer_rx".to_string(), fmt_list(&cfg.geometry.interferer_rx)),
        ("geometry.pathloss_exponent".to_string(), fmt(cfg.geometry.pathloss_exponent)),
        (
            "geometry.ris_height".to_string(),
            cfg.geometry.ris_height.map_or_else(|| "none".to_string(), fmt),
        ),
        ("geometry.direct_link_mean".to_string(), fmt(cfg.geometry.direct_link_mean)),
        ("ris.total_elements".to_string(), cfg.ris.total_elements.to_string()),
        ("ris.eh_elements".to_string(), cfg.ris.eh_elements.to_string()),
        ("ris.quantization_bits".to_string(), cfg.ris.quantization_bits.to_string()),
        ("ris.element_power".to_string(), fmt(cfg.ris.element_power)),
        ("ris.controller_power".to_string(), fmt(cfg.ris.controller_power)),
        ("ris.slot_duration".to_string(), fmt(cfg.ris.slot_duration)),
        ("interferer_powers".to_string(), fmt_list(&cfg.interferer_powers)),
        ("noise_floor".to_string(), fmt(cfg.noise_floor)),
        ("samples_per_symbol".to_string(), cfg.samples_per_symbol.to_string()),
        ("repetitions".to_string(), cfg.repetitions.to_string()),
    ];
    match &cfg.eh_model {
        EhModel::Linear { efficiency } => {
            out.push(("eh_model".to_string(), "linear".to_string()));
            out.push(("eh.efficiency".to_string(), fmt(*efficiency)));
        }
        EhModel::NonLinear { a1, a2, a3, unit } => {
            out.push(("eh_model".to_string(), "nonlinear".to_string()));
            out.push(("eh.a1".to_string(), fmt(*a1)));
            out.push(("eh.a2".to_string(), fmt(*a2)));
            out.push(("eh.a3".to_string(), fmt(*a3)));
            out.push((
                "eh.unit".to_string(),
                match unit {
                    PowerUnit::Watts => "W".to_string(),
                    PowerUnit::Milliwatts => "mW".to_string(),
                },
            ));
        }
    }
    out.push(("rx_power".to_string(), fmt(cfg.rx_power)));
    out.push(("tx_power".to_string(), fmt(cfg.tx_power)));
    out
}

/// Renders a config as a parseable file.
pub fn render_config(cfg: &SystemConfig) -> String {
    let mut s = String::new();
    for (k, v) in canonical_entries(cfg) {
        s.push_str(&k);
        s.push_str(" = ");
        s.push_str(&v);
        s.push('\n');
    }
    s
}

/// FNV-1a hash of the canonical form; identifies a scenario in CSV output.
pub fn config_hash(cfg: &SystemConfig) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in render_config(cfg).bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x1000_0000_01b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysmodel::watts_to_dbm;
    use approx::assert_relative_eq;

    #[test]
    fn defaults_validate_and_match_scenario() {
        let cfg = default_config().validate().unwrap();
        assert_relative_eq!(cfg.sigma0_sq(), 1e-4, max_relative = 1e-12);
        assert_relative_eq!(cfg.sigma1_sq(), 1.5e-3, max_relative = 1e-12);
        assert_relative_eq!(cfg.noise_floor, 1e-13, max_relative = 1e-12);
        assert_eq!(cfg.interferer_powers, vec![0.1; 4]);
        assert_eq!(cfg.ris.reflect_elements(), 75);
        assert_eq!(cfg.ris.quantization_levels(), 4);
        assert_relative_eq!(watts_to_dbm(cfg.tx_power), -30.0, max_relative = 1e-12);
    }

    #[test]
    fn power_suffixes() {
        assert_relative_eq!(parse_power("20dBm").unwrap(), 0.1, max_relative = 1e-12);
        assert_relative_eq!(parse_power("-10dBm").unwrap(), 1e-4, max_relative = 1e-12);
        assert_relative_eq!(parse_power("1mW").unwrap(), 1e-3, max_relative = 1e-15);
        assert_relative_eq!(parse_power("3uW").unwrap(), 3e-6, max_relative = 1e-15);
        assert_relative_eq!(parse_power("2.5nW").unwrap(), 2.5e-9, max_relative = 1e-15);
        assert_relative_eq!(parse_power("1e-4W").unwrap(), 1e-4, max_relative = 1e-15);
        assert_relative_eq!(parse_power("0.5").unwrap(), 0.5, max_relative = 1e-15);
        assert!(parse_power("watts").is_err());
        assert!(parse_power("1q W").is_err());
    }

    #[test]
    fn parse_applies_keys_comments_and_aliases() {
        let cfg = parse_config(
            "# scenario tweaks\n\
             N1 = 60\n\
             repetitions = 3   # alias-free form\n\
             P_k = 20dBm, 10dBm\n\
             d1k = 12, 14\n\
             dDk = 18, 20\n\
             sigma0 = -13dBm\n\
             \n\
             tx_power = 2uW\n",
        )
        .unwrap();
        assert_eq!(cfg.ris.eh_elements, 60);
        assert_eq!(cfg.repetitions, 3);
        assert_eq!(cfg.interferer_powers.len(), 2);
        assert_relative_eq!(cfg.interferer_powers[1], 0.01, max_relative = 1e-12);
        assert_relative_eq!(cfg.sigma0_sq(), dbm_to_watts(-13.0), max_relative = 1e-12);
        assert_relative_eq!(cfg.tx_power, 2e-6, max_relative = 1e-15);
        cfg.validate().unwrap();
    }

    #[test]
    fn parse_rejects_unknown_keys_and_bad_lines() {
        let err = parse_config("frobnicate = 3\n").unwrap_err().to_string();
        assert!(err.contains("frobnicate"), "got: {err}");
        let err = parse_config("just a line\n").unwrap_err().to_string();
        assert!(err.contains("line 1"), "got: {err}");
    }

    #[test]
    fn eh_model_switching_is_order_independent() {
        let a = parse_config("eh_model = nonlinear\neh.unit = mW\neh.a1 = 2.5\n").unwrap();
        let b = parse_config("eh.a1 = 2.5\neh.unit = mW\neh_model = nonlinear\n").unwrap();
        assert_eq!(a.eh_model, b.eh_model);
        match a.eh_model {
            EhModel::NonLinear { a1, unit, .. } => {
                assert_relative_eq!(a1, 2.5);
                assert_eq!(unit, PowerUnit::Milliwatts);
            }
            _ => panic!("expected nonlinear model"),
        }
        // detail keys without the right model are hard errors
        assert!(parse_config("eh.a1 = 2.5\n").is_err());
        assert!(parse_config("eh_model = nonlinear\neta = 0.5\n").is_err());
    }

    #[test]
    fn set_by_path_handles_indices() {
        let mut cfg = default_config();
        set_by_path(&mut cfg, "interferer_powers.2", "10dBm").unwrap();
        assert_relative_eq!(cfg.interferer_powers[2], 0.01, max_relative = 1e-12);
        assert_relative_eq!(cfg.interferer_powers[0], 0.1, max_relative = 1e-12);
        set_by_path(&mut cfg, "geometry.interferer_ris.0", "13").unwrap();
        assert_relative_eq!(cfg.geometry.interferer_ris[0], 13.0);
        let err = set_by_path(&mut cfg, "interferer_powers.9", "1mW").unwrap_err().to_string();
        assert!(err.contains("out of range"), "got: {err}");
    }

    #[test]
    fn ris_height_is_optional() {
        let mut cfg = default_config();
        assert_eq!(cfg.geometry.ris_height, None);
        set_by_path(&mut cfg, "H", "3").unwrap();
        assert_eq!(cfg.geometry.ris_height, Some(3.0));
        set_by_path(&mut cfg, "geometry.ris_height", "none").unwrap();
        assert_eq!(cfg.geometry.ris_height, None);
    }

    #[test]
    fn render_parse_round_trip() {
        let mut cfg = default_config();
        cfg.ris.eh_elements = 97;
        cfg.eh_model = EhModel::nonlinear_default();
        cfg.geometry.ris_height = Some(3.0);
        let text = render_config(&cfg);
        let back = parse_config(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let cfg = default_config();
        assert_eq!(config_hash(&cfg), config_hash(&cfg.clone()));
        let mut other = cfg.clone();
        other.ris.eh_elements = 126;
        assert_ne!(config_hash(&cfg), config_hash(&other));
    }
}
