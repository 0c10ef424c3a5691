use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::format_float;

/// Photon counts at both detectors in one detection window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionEvent {
    pub time: f64,
    pub m_c: u64,
    pub m_d: u64,
}

impl DetectionEvent {
    pub fn new(time: f64, m_c: u64, m_d: u64) -> Self {
        Self { time, m_c, m_d }
    }
}

/// Detection events with strictly increasing times.
///
/// JSON form: `[{"time": 0.0, "m_c": 3, "m_d": 1}, ...]`; CSV form: a
/// `time,m_c,m_d` header followed by one row per event.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<DetectionEvent>", into = "Vec<DetectionEvent>")]
pub struct DetectionHistory {
    events: Vec<DetectionEvent>,
}

impl TryFrom<Vec<DetectionEvent>> for DetectionHistory {
    type Error = Error;

    fn try_from(events: Vec<DetectionEvent>) -> Result<Self> {
        Self::new(events)
    }
}

impl From<DetectionHistory> for Vec<DetectionEvent> {
    fn from(h: DetectionHistory) -> Self {
        h.events
    }
}

impl DetectionHistory {
    pub fn new(events: Vec<DetectionEvent>) -> Result<Self> {
        if let Some(e) = events.iter().find(|e| !e.time.is_finite()) {
            return Err(Error::Input(format!("event time {} is not finite", e.time)));
        }
        if let Some(w) = events.windows(2).find(|w| w[1].time <= w[0].time) {
            return Err(Error::Input(format!(
                "event times must increase strictly ({} then {})",
                w[0].time, w[1].time
            )));
        }
        Ok(Self { events })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// One window at time 0.
    pub fn single(m_c: u64, m_d: u64) -> Self {
        Self { events: vec![DetectionEvent::new(0.0, m_c, m_d)] }
    }

    pub fn events(&self) -> &[DetectionEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Appends an event later than every existing one.
    pub fn push(&mut self, event: DetectionEvent) -> Result<()> {
        if let Some(last) = self.events.last() {
            if event.time <= last.time || !event.time.is_finite() {
                return Err(Error::Input(format!(
                    "event at time {} does not follow {}",
                    event.time, last.time
                )));
            }
        }
        self.events.push(event);
        Ok(())
    }

    /// Total `(M_c, M_d)` over all events.
    pub fn total_counts(&self) -> (u64, u64) {
        self.events.iter().fold((0, 0), |(c, d), e| (c + e.m_c, d + e.m_d))
    }

    /// All times shifted by `dt`.
    pub fn shifted(&self, dt: f64) -> Result<Self> {
        Self::new(self.events.iter().map(|e| DetectionEvent::new(e.time + dt, e.m_c, e.m_d)).collect())
    }

    pub fn from_json_reader(reader: impl Read) -> Result<Self> {
        Ok(serde_json::from_reader(reader)?)
    }

    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["time", "m_c", "m_d"] {
            return Err(Error::Input(format!("expected CSV header time,m_c,m_d, got {headers:?}")));
        }
        let events = rdr.deserialize().collect::<std::result::Result<Vec<DetectionEvent>, _>>()?;
        Self::new(events)
    }

    pub fn write_csv(&self, mut writer: impl Write) -> Result<()> {
        writeln!(writer, "time,m_c,m_d")?;
        for e in &self.events {
            writeln!(writer, "{},{},{}", format_float(e.time), e.m_c, e.m_d)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn times_must_increase() {
        assert!(DetectionHistory::new(vec![DetectionEvent::new(1.0, 0, 0), DetectionEvent::new(1.0, 1, 0)]).is_err());
        let mut h = DetectionHistory::single(1, 0);
        assert!(h.push(DetectionEvent::new(-1.0, 0, 0)).is_err());
        h.push(DetectionEvent::new(0.5, 2, 3)).unwrap();
        assert_eq!(h.total_counts(), (3, 3));
    }

    #[test]
    fn json_and_csv_forms() {
        let h: DetectionHistory =
            serde_json::from_str(r#"[{"time":0,"m_c":2,"m_d":1},{"time":1.5,"m_c":0,"m_d":4}]"#).unwrap();
        assert_eq!(h.len(), 2);
        assert!(serde_json::from_str::<DetectionHistory>(r#"[{"time":0,"m_c":2,"m_d":1,"x":1}]"#).is_err());
        assert!(serde_json::from_str::<DetectionHistory>(r#"[{"time":1,"m_c":2,"m_d":1},{"time":0,"m_c":0,"m_d":0}]"#).is_err());

        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let back = DetectionHistory::from_csv_reader(buf.as_slice()).unwrap();
        assert_eq!(back, h);
        assert!(DetectionHistory::from_csv_reader("t,c,d\n0,1,1\n".as_bytes()).is_err());
    }
}
