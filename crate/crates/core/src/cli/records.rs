//! Newline-delimited run records, one `trial,a,b,ca,cb` line per run.

use crate::types::{OutcomePair, RunRecord, SettingPair};

use super::CliError;

pub fn write_records(records: &[RunRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 16);
    for r in records {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

fn parse_line(line: &str) -> Option<RunRecord> {
    let mut fields = line.split(',').map(str::trim);
    let trial = fields.next()?.parse().ok()?;
    let a = fields.next()?.parse().ok()?;
    let b = fields.next()?.parse().ok()?;
    let ca = fields.next()?.parse().ok()?;
    let cb = fields.next()?.parse().ok()?;
    if fields.next().is_some() {
        return None;
    }
    Some(RunRecord {
        trial,
        pair: SettingPair::new(a, b),
        outcome: OutcomePair::new(ca, cb),
    })
}

/// Blank lines are skipped; anything else must be a full record.
pub fn parse_records(text: &str) -> Result<Vec<RunRecord>, CliError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_line(l).ok_or_else(|| CliError::MalformedRecord {
                line: i + 1,
                content: l.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Color, Setting};

    #[test]
    fn round_trip() {
        let records = vec![
            RunRecord {
                trial: 0,
                pair: SettingPair::new(Setting::One, Setting::Three),
                outcome: OutcomePair::new(Color::Red, Color::Green),
            },
            RunRecord {
                trial: 1,
                pair: SettingPair::new(Setting::Two, Setting::Two),
                outcome: OutcomePair::new(Color::Green, Color::Green),
            },
        ];
        let text = write_records(&records);
        assert_eq!(text, "0,1,3,R,G\n1,2,2,G,G\n");
        assert_eq!(parse_records(&text).unwrap(), records);
    }

    #[test]
    fn malformed_line_number() {
        let err = parse_records("0,1,1,R,R\n\n2,1,4,R,R\n").unwrap_err();
        match err {
            CliError::MalformedRecord { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_records("0,1,1,R,R,extra\n").is_err());
        assert!(parse_records("0,1,1,R\n").is_err());
        assert_eq!(parse_records("").unwrap(), vec![]);
    }
}
