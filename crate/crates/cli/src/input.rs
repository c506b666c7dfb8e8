//! Models from JSON files or gallery references.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use chainrec::gallery;
use chainrec::SystemModel;

/// Prefix that marks a gallery reference such as `gallery:tent:n_grid=128`.
pub const GALLERY_PREFIX: &str = "gallery:";

/// Parses `key=value` items.
pub fn parse_params<S: AsRef<str>>(items: &[S]) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in items {
        let item = item.as_ref();
        let (k, v) = item.split_once('=').ok_or_else(|| anyhow!("parameter {item:?} is not key=value"))?;
        let value: f64 = v.trim().parse().with_context(|| format!("parameter {k}: {v:?} is not a number"))?;
        if out.insert(k.trim().to_string(), value).is_some() {
            bail!("parameter {k} given twice");
        }
    }
    Ok(out)
}

/// Builds a gallery model from `name[:key=value,...]`.
pub fn gallery_ref(spec: &str) -> Result<SystemModel> {
    let (name, params) = match spec.split_once(':') {
        Some((name, rest)) => (name, rest.split(',').filter(|s| !s.is_empty()).collect::<Vec<_>>()),
        None => (spec, Vec::new()),
    };
    Ok(gallery::build(name, &parse_params(&params)?)?)
}

/// Parses a model from JSON text; errors name the field path, line and column.
pub fn parse_model(text: &str, origin: &str) -> Result<SystemModel> {
    let mut de = serde_json::Deserializer::from_str(text);
    let model: SystemModel = serde_path_to_error::deserialize(&mut de).map_err(|e| match e.path().to_string() {
        p if p == "." => anyhow!("{origin}: {}", e.inner()),
        p => anyhow!("{origin}: field {p}: {}", e.inner()),
    })?;
    de.end().map_err(|e| anyhow!("{origin}: {e}"))?;
    model.validate().with_context(|| format!("{origin}: invalid model"))?;
    Ok(model)
}

/// A model file path or a `gallery:` reference.
pub fn load(input: &str) -> Result<SystemModel> {
    if let Some(spec) = input.strip_prefix(GALLERY_PREFIX) {
        return gallery_ref(spec);
    }
    let path = Path::new(input);
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {input}"))?;
    parse_model(&text, input)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_parse_and_reject_junk() {
        let p = parse_params(&["n=20", "tau=0.5"]).unwrap();
        assert_eq!(p["n"], 20.0);
        assert!(parse_params(&["n"]).is_err());
        assert!(parse_params(&["n=x"]).is_err());
        assert!(parse_params(&["n=1", "n=2"]).is_err());
    }

    #[test]
    fn gallery_refs_take_params() {
        assert_eq!(gallery_ref("z-star:n=6").unwrap().n(), 14);
        assert!(gallery_ref("z-star:m=6").is_err());
    }

    #[test]
    fn malformed_models_report_the_position() {
        let err = parse_model("{\n  \"name\": \"x\",\n  \"eps\": \"wide\"\n}", "m.json").unwrap_err().to_string();
        assert!(err.contains("m.json") && err.contains("field eps") && err.contains("line 3"), "{err}");
        let err = parse_model(r#"{"name":"x","eps":0.1}"#, "m.json").unwrap_err().to_string();
        assert!(err.contains("missing field"), "{err}");
    }
}
