//! Text formats: strategy files and CSV logs.
//!
//! Numbers are written with 17 significant digits, enough to round-trip
//! any `f64`, so written files reload to identical values.

use std::fmt::Write as _;
use std::path::Path;

use crate::cfr::{CfrLogRow, CFR_CSV_HEADER};
use crate::efg::{Game, InfoSetKey, StrategyProfile};
use crate::error::{Error, Result};
use crate::eval::{MatchResult, MATCH_CSV_HEADER};
use crate::rcfr::{RcfrLogRow, RCFR_CSV_HEADER};
use crate::regret::{RrmLogRow, RRM_CSV_HEADER};

pub const STRATEGY_MAGIC: &str = "# fregret-strategy v1";

/// Per-infoset sum tolerance when loading.
pub const LOAD_TOLERANCE: f64 = 1e-6;

/// Fixed-precision float formatting used in every output file.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders a strategy file: header, then `infoset_key,action_index,probability`
/// sorted by key then action.
pub fn write_strategy(game_id: &str, profile: &StrategyProfile) -> String {
    let mut entries: Vec<(&InfoSetKey, &[f64])> = profile.iter().map(|(_, k, v)| (k, v)).collect();
    entries.sort_by(|a, b| a.0.cmp(b.0));
    let mut out = format!("{STRATEGY_MAGIC} game={game_id} exploit_convention=sum\n");
    for (key, probs) in entries {
        for (a, &p) in probs.iter().enumerate() {
            writeln!(out, "{key},{a},{}", fmt_f64(p)).unwrap();
        }
    }
    out
}

/// Game id named in a strategy file header.
pub fn strategy_game_id(text: &str) -> Result<String> {
    let header = text.lines().next().unwrap_or("");
    let rest = header.strip_prefix(STRATEGY_MAGIC).ok_or_else(|| Error::Parse {
        line: 1,
        reason: format!("expected header starting with `{STRATEGY_MAGIC}`"),
    })?;
    rest.split_whitespace()
        .find_map(|f| f.strip_prefix("game="))
        .map(str::to_owned)
        .ok_or_else(|| Error::Parse {
            line: 1,
            reason: "header has no game=<id> field".into(),
        })
}

/// Parses and validates a strategy file against `game`. Every infoset must
/// appear, actions must be complete, and each distribution must sum to one
/// within [`LOAD_TOLERANCE`].
pub fn read_strategy(game: &Game, text: &str) -> Result<StrategyProfile> {
    let id = strategy_game_id(text)?;
    if id != game.name() {
        return Err(Error::Parse {
            line: 1,
            reason: format!("strategy is for game {id}, expected {}", game.name()),
        });
    }
    let mut rows: Vec<Vec<Option<f64>>> = game.infosets().iter().map(|i| vec![None; i.num_actions()]).collect();
    for (n, line) in text.lines().enumerate().skip(1) {
        let line_no = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| Error::Parse { line: line_no, reason };
        let mut fields = line.rsplitn(3, ',');
        let (Some(prob), Some(action), Some(key)) = (fields.next(), fields.next(), fields.next()) else {
            return Err(bad("expected infoset_key,action_index,probability".into()));
        };
        let key = InfoSetKey::new(key);
        let infoset = game
            .infoset_index(&key)
            .ok_or_else(|| bad(format!("unknown infoset {key} for game {id}")))?;
        let action: usize = action.parse().map_err(|_| bad(format!("bad action index {action:?}")))?;
        let prob: f64 = prob.parse().map_err(|_| bad(format!("bad probability {prob:?}")))?;
        let slot = rows[infoset]
            .get_mut(action)
            .ok_or_else(|| bad(format!("action {action} out of range for {key}")))?;
        if slot.is_some() {
            return Err(bad(format!("duplicate entry for {key} action {action}")));
        }
        *slot = Some(prob);
    }
    let mut profile = StrategyProfile::new();
    for (info, row) in game.infosets().iter().zip(rows) {
        let probs: Option<Vec<f64>> = row.into_iter().collect();
        let probs = probs.ok_or_else(|| Error::InvalidStrategy {
            key: info.key.to_string(),
            reason: "missing actions".into(),
        })?;
        profile.insert(info.player, info.key.clone(), probs);
    }
    profile.validate(LOAD_TOLERANCE)?;
    Ok(profile)
}

pub fn load_strategy(game: &Game, path: &Path) -> Result<StrategyProfile> {
    read_strategy(game, &std::fs::read_to_string(path)?)
}

fn csv(header: &str, lines: impl Iterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

/// CFR convergence CSV. `timing = false` writes zeros in `wall_ms` so
/// repeated runs are byte-identical.
pub fn cfr_csv(rows: &[CfrLogRow], timing: bool) -> String {
    csv(
        CFR_CSV_HEADER,
        rows.iter().map(|r| {
            format!(
                "{},{},{},{}",
                r.t,
                fmt_f64(r.exploitability),
                fmt_f64(r.max_pos_regret_sum),
                fmt_f64(if timing { r.wall_ms } else { 0.0 })
            )
        }),
    )
}

pub fn rcfr_csv(rows: &[RcfrLogRow], timing: bool) -> String {
    csv(
        RCFR_CSV_HEADER,
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{}",
                r.t,
                fmt_f64(r.exploitability),
                fmt_f64(r.mse[0]),
                fmt_f64(r.mse[1]),
                r.leaves[0],
                r.leaves[1],
                fmt_f64(if timing { r.wall_ms } else { 0.0 })
            )
        }),
    )
}

pub fn rrm_csv(rows: &[RrmLogRow]) -> String {
    csv(
        RRM_CSV_HEADER,
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{}",
                r.t,
                fmt_f64(r.avg_regret),
                fmt_f64(r.bound),
                fmt_f64(r.epsilon),
                r.seed
            )
        }),
    )
}

pub fn match_csv(result: &MatchResult) -> String {
    csv(
        MATCH_CSV_HEADER,
        std::iter::once(format!(
            "{},{},{},{},{}",
            result.hands,
            fmt_f64(result.mean),
            fmt_f64(result.stderr),
            result.seed,
            result.duplicate
        )),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::build_kuhn;

    #[test]
    fn uniform_kuhn_file() {
        let game = build_kuhn();
        let text = write_strategy("kuhn", &StrategyProfile::uniform(&game));
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# fregret-strategy v1 game=kuhn exploit_convention=sum");
        assert_eq!(lines.next().unwrap(), "p1:J:-:,0,5.0000000000000000e-1");
        assert_eq!(text.lines().count(), 1 + 24);
        let back = read_strategy(&game, &text).unwrap();
        assert_eq!(back, StrategyProfile::uniform(&game));
        assert_eq!(write_strategy("kuhn", &back), text);
    }

    #[test]
    fn bad_sum_names_infoset() {
        let game = build_kuhn();
        let text = write_strategy("kuhn", &StrategyProfile::uniform(&game))
            .replace("p2:Q:-:r,1,5.0000000000000000e-1", "p2:Q:-:r,1,3.0000000000000000e-1");
        let err = read_strategy(&game, &text).unwrap_err();
        assert!(err.to_string().contains("p2:Q:-:r"), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let game = build_kuhn();
        let good = write_strategy("kuhn", &StrategyProfile::uniform(&game));
        let broken = good.replacen("p1:J:-:,1,", "p1:J:-:,x,", 1);
        assert!(matches!(read_strategy(&game, &broken), Err(Error::Parse { line: 3, .. })));
        let unknown = format!("{good}p1:A:-:,0,1\n");
        assert!(matches!(read_strategy(&game, &unknown), Err(Error::Parse { line: 26, .. })));
        let wrong_game = good.replace("game=kuhn", "game=leduc");
        assert!(matches!(read_strategy(&game, &wrong_game), Err(Error::Parse { line: 1, .. })));
        assert!(read_strategy(&game, "").is_err());
        let missing: String = good.lines().take(24).map(|l| format!("{l}\n")).collect();
        assert!(matches!(read_strategy(&game, &missing), Err(Error::InvalidStrategy { .. })));
    }

    #[test]
    fn fixed_precision() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-1.0 / 18.0).parse::<f64>().unwrap(), -1.0 / 18.0);
    }
}
