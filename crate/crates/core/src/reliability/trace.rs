//! Line-oriented event log: `slot link EVENT detail`.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    Tx,
    Erase,
    Rx,
    Ack,
    Nack,
    Decode,
    Release,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Tx => "TX",
            EventKind::Erase => "ERASE",
            EventKind::Rx => "RX",
            EventKind::Ack => "ACK",
            EventKind::Nack => "NACK",
            EventKind::Decode => "DECODE",
            EventKind::Release => "RELEASE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub slot: u64,
    /// Link index; `None` for receiver-side events not tied to a link.
    pub link: Option<usize>,
    pub kind: EventKind,
    pub detail: String,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.link {
            Some(l) => write!(f, "{} {} {}", self.slot, l, self.kind.name())?,
            None => write!(f, "{} - {}", self.slot, self.kind.name())?,
        }
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

/// Optional event sink; recording is skipped entirely when disabled.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    events: Option<Vec<TraceEvent>>,
}

impl Trace {
    pub fn enabled() -> Self {
        Trace {
            events: Some(Vec::new()),
        }
    }

    pub fn disabled() -> Self {
        Trace { events: None }
    }

    pub fn is_enabled(&self) -> bool {
        self.events.is_some()
    }

    pub fn push(&mut self, slot: u64, link: Option<usize>, kind: EventKind, detail: impl FnOnce() -> String) {
        if let Some(ev) = &mut self.events {
            ev.push(TraceEvent {
                slot,
                link,
                kind,
                detail: detail(),
            });
        }
    }

    pub fn events(&self) -> &[TraceEvent] {
        self.events.as_deref().unwrap_or(&[])
    }

    pub fn lines(&self) -> Vec<String> {
        self.events().iter().map(|e| e.to_string()).collect()
    }
}
