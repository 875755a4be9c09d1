//! Service configuration: defaults, then a TOML file, then `FHG_*`
//! environment variables, then command-line flags.
//!
//! Environment overrides name a section and key separated by a double
//! underscore, e.g. `FHG_GAME__SEED=7` or `FHG_SERVER__BIND=0.0.0.0:9000`.
//! Values are parsed as TOML scalars, falling back to plain strings.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use fhg_core::session::Scenario;
use fhg_core::SimConfig;
use serde::{Deserialize, Serialize};

pub const ENV_PREFIX: &str = "FHG_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerSettings {
    pub bind: String,
    /// Directory for live session logs; no logs are written when unset.
    pub log_dir: Option<PathBuf>,
    /// Scenario started when a client connects.
    pub scenario: Scenario,
    /// Stream per-tick scene projections for sighted rendering.
    pub send_scene: bool,
    pub participant: String,
}

impl Default for ServerSettings {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1:8737".into(),
            log_dir: None,
            scenario: Scenario::Hallway,
            send_scene: true,
            participant: String::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(flatten)]
    pub sim: SimConfig,
    pub server: ServerSettings,
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn parse_scalar(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

impl ServiceConfig {
    /// Layers file and environment over the defaults.
    pub fn load<I>(file: Option<&Path>, env: I) -> anyhow::Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut table = toml::Table::try_from(ServiceConfig::default())?;
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            let over: toml::Table = text
                .parse()
                .with_context(|| format!("parsing config file {}", path.display()))?;
            merge(&mut table, over);
        }
        let mut env: Vec<(String, String)> = env
            .into_iter()
            .filter(|(k, _)| k.starts_with(ENV_PREFIX))
            .collect();
        env.sort();
        for (key, raw) in env {
            let path = key[ENV_PREFIX.len()..].to_ascii_lowercase();
            let Some((section, field)) = path.split_once("__") else {
                bail!("environment override {key} must look like FHG_<SECTION>__<KEY>");
            };
            let mut over = toml::Table::new();
            let mut inner = toml::Table::new();
            inner.insert(field.to_string(), parse_scalar(&raw));
            over.insert(section.to_string(), toml::Value::Table(inner));
            merge(&mut table, over);
        }
        let cfg: ServiceConfig = toml::Value::Table(table)
            .try_into()
            .context("invalid configuration")?;
        cfg.sim.validate()?;
        Ok(cfg)
    }

    /// Applies `section.key=value` overrides on top of the current values.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> anyhow::Result<()> {
        if overrides.is_empty() {
            return Ok(());
        }
        let mut table = toml::Table::try_from(&*self)?;
        for item in overrides {
            let Some((path, raw)) = item.split_once('=') else {
                bail!("override {item:?} must look like section.key=value");
            };
            let Some((section, field)) = path.trim().split_once('.') else {
                bail!("override {item:?} must name a section and a key");
            };
            let mut inner = toml::Table::new();
            inner.insert(field.to_string(), parse_scalar(raw.trim()));
            let mut over = toml::Table::new();
            over.insert(section.to_string(), toml::Value::Table(inner));
            merge(&mut table, over);
        }
        let cfg: ServiceConfig = toml::Value::Table(table)
            .try_into()
            .context("invalid configuration override")?;
        cfg.sim.validate()?;
        *self = cfg;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = ServiceConfig::default();
        let text = cfg.to_toml();
        let back: ServiceConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert!(text.contains("monster_total = 11"));
        assert!(text.contains("pulse_period = 14"));
    }

    #[test]
    fn precedence_file_then_env() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(
            f,
            "[game]\nseed = 5\ngrid_cols = 6\n[server]\nbind = \"0.0.0.0:1\""
        )
        .unwrap();
        let env = vec![
            ("FHG_GAME__SEED".to_string(), "9".to_string()),
            ("FHG_TRACKER__X_MIN".to_string(), "-200.5".to_string()),
            ("FHG_SERVER__PARTICIPANT".to_string(), "p01".to_string()),
            ("HOME".to_string(), "/root".to_string()),
        ];
        let cfg = ServiceConfig::load(Some(f.path()), env).unwrap();
        assert_eq!(cfg.sim.game.seed, 9);
        assert_eq!(cfg.sim.game.grid_cols, 6);
        assert_eq!(cfg.sim.tracker.x_min, -200.5);
        assert_eq!(cfg.server.bind, "0.0.0.0:1");
        assert_eq!(cfg.server.participant, "p01");
    }

    #[test]
    fn rejects_unknown_keys_and_invalid_values() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "[game]\nmonstr_total = 3").unwrap();
        assert!(ServiceConfig::load(Some(f.path()), vec![]).is_err());
        let env = vec![("FHG_GAME__FOV_H".to_string(), "300".to_string())];
        assert!(ServiceConfig::load(None, env).is_err());
        let env = vec![("FHG_SEED".to_string(), "1".to_string())];
        assert!(ServiceConfig::load(None, env).is_err());
    }

    #[test]
    fn overrides_win_over_env() {
        let env = vec![("FHG_GAME__AVATAR_SPEED".to_string(), "1.0".to_string())];
        let mut cfg = ServiceConfig::load(None, env).unwrap();
        cfg.apply_overrides(&[
            "game.avatar_speed=0.5".into(),
            "server.scenario=demo".into(),
        ])
        .unwrap();
        assert_eq!(cfg.sim.game.avatar_speed, 0.5);
        assert_eq!(cfg.server.scenario, Scenario::Demo);
        assert!(cfg.apply_overrides(&["game.tick_rate=0".into()]).is_err());
        assert!(cfg.apply_overrides(&["seed=3".into()]).is_err());
    }
}
