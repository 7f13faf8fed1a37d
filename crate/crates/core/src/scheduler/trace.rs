use std::fmt;

use super::rob::TerminationCause;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    Arrive,
    Dispatch,
    Finish,
    EarlyTerminate(TerminationCause),
    Expel,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Arrive => "arrive",
            EventKind::Dispatch => "dispatch",
            EventKind::Finish => "finish",
            EventKind::EarlyTerminate(TerminationCause::Overflow) => "terminate_overflow",
            EventKind::EarlyTerminate(TerminationCause::OutputDue) => "terminate_output_due",
            EventKind::Expel => "expel",
        }
    }
}

/// One line of the cycle trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TraceEvent {
    pub cycle: u64,
    pub kind: EventKind,
    pub decoder: Option<usize>,
    pub arrival_index: u64,
    pub slot: Option<usize>,
}

impl fmt::Display for TraceEvent {
    /// `cycle kind decoder arrival_index slot`, with `-` for absent fields.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
        write!(
            f,
            "{} {} {} {} {}",
            self.cycle,
            self.kind.name(),
            opt(self.decoder),
            self.arrival_index,
            opt(self.slot)
        )
    }
}

/// Renders a trace as text, one event per line.
pub fn format_trace(events: &[TraceEvent]) -> String {
    let mut out = String::from("# cycle event decoder arrival_index rob_slot\n");
    for e in events {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}
