//! Message-level execution of the `(m, m+2)` DF MHMR schedule.
//!
//! Sub-messages are integers in `Z_L` and network coding is addition mod
//! `L`. Links are error-free: every scheduled decode succeeds by subtracting
//! the component the receiver already knows. Node `i` is relay `r_i`, node 0
//! is `a` and node `m + 1` is `b`.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Terminal {
    A,
    B,
}

/// Sub-message `w_{source,(index)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubMessageId {
    pub source: Terminal,
    pub index: usize,
}

impl fmt::Display for SubMessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.source {
            Terminal::A => write!(f, "a{}", self.index),
            Terminal::B => write!(f, "b{}", self.index),
        }
    }
}

/// A transmitted combination `w_a(i) ⊕ w_b(j)`; either part may be absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Payload {
    pub a: Option<usize>,
    pub b: Option<usize>,
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (Some(i), Some(j)) => write!(f, "a{i}^b{j}"),
            (Some(i), None) => write!(f, "a{i}"),
            (None, Some(j)) => write!(f, "b{j}"),
            (None, None) => write!(f, "-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decode {
    pub node: usize,
    pub message: SubMessageId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEvent {
    pub slot: usize,
    pub phase: usize,
    pub tx: usize,
    pub payload: Payload,
    /// Payload value in `Z_L` as transmitted.
    pub value: u64,
    pub decoders: Vec<Decode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleTranscript {
    pub m: usize,
    pub blocks: usize,
    pub modulus: u64,
    pub events: Vec<ScheduleEvent>,
}

fn node_label(m: usize, n: usize) -> String {
    match n {
        0 => "a".into(),
        x if x == m + 1 => "b".into(),
        x => format!("r{x}"),
    }
}

impl ScheduleTranscript {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let line = json!({
                "slot": e.slot,
                "phase": e.phase,
                "tx": node_label(self.m, e.tx),
                "payload": e.payload.to_string(),
                "value": e.value,
                "decoders": e.decoders.iter().map(|d| node_label(self.m, d.node)).collect::<Vec<_>>(),
                "decoded": e.decoders.iter().map(|d| d.message.to_string()).collect::<Vec<_>>(),
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}

/// `B(m+2) + m(m-1)/2`.
pub fn phase_count(m: usize, blocks: usize) -> Result<usize> {
    check_shape(m, blocks)?;
    Ok(blocks * (m + 2) + m * (m - 1) / 2)
}

fn check_shape(m: usize, blocks: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::ProtocolUndefined(format!("the (m, m+2) schedule needs m >= 2, got {m}")));
    }
    if blocks < m {
        return Err(Error::InsufficientBlocks { blocks, m });
    }
    Ok(())
}

// Per-node knowledge of both streams.
struct Knowledge {
    a: Vec<Vec<Option<u64>>>,
    b: Vec<Vec<Option<u64>>>,
    modulus: u64,
}

impl Knowledge {
    fn new(m: usize, msgs_a: &[u64], msgs_b: &[u64], modulus: u64) -> Self {
        let blocks = msgs_a.len();
        let mut a = vec![vec![None; blocks]; m + 2];
        let mut b = vec![vec![None; blocks]; m + 2];
        a[0] = msgs_a.iter().map(|&v| Some(v)).collect();
        b[m + 1] = msgs_b.iter().map(|&v| Some(v)).collect();
        Knowledge { a, b, modulus }
    }

    fn get(&self, node: usize, id: SubMessageId) -> Option<u64> {
        match id.source {
            Terminal::A => self.a[node][id.index],
            Terminal::B => self.b[node][id.index],
        }
    }

    fn set(&mut self, node: usize, id: SubMessageId, v: u64) {
        match id.source {
            Terminal::A => self.a[node][id.index] = Some(v),
            Terminal::B => self.b[node][id.index] = Some(v),
        }
    }

    /// Value of `payload` from `node`'s point of view.
    fn encode(&self, node: usize, p: Payload) -> Option<u64> {
        let a = match p.a {
            Some(i) => self.a[node][i]?,
            None => 0,
        };
        let b = match p.b {
            Some(j) => self.b[node][j]?,
            None => 0,
        };
        Some((a + b) % self.modulus)
    }

    /// Recovers `target` from `value` by subtracting the other component.
    fn decode(&self, node: usize, p: Payload, value: u64, target: SubMessageId) -> Option<u64> {
        let other = match target.source {
            Terminal::A => p.b.map(|j| self.b[node][j]),
            Terminal::B => p.a.map(|i| self.a[node][i]),
        };
        let known = match other {
            None => 0,
            Some(v) => v?,
        };
        Some((value + self.modulus - known) % self.modulus)
    }
}

fn a_msg(index: usize) -> SubMessageId {
    SubMessageId { source: Terminal::A, index }
}

fn b_msg(index: usize) -> SubMessageId {
    SubMessageId { source: Terminal::B, index }
}

/// Runs the initialization, main routine and termination steps.
pub fn run_schedule(m: usize, blocks: usize, msgs_a: &[u64], msgs_b: &[u64], modulus: u64) -> Result<ScheduleTranscript> {
    check_shape(m, blocks)?;
    if modulus < 2 {
        return Err(Error::InvalidArgument(format!("group size L = {modulus} must be at least 2")));
    }
    if msgs_a.len() != blocks || msgs_b.len() != blocks {
        return Err(Error::InvalidArgument(format!(
            "expected {blocks} sub-messages per terminal, got {} and {}",
            msgs_a.len(),
            msgs_b.len()
        )));
    }
    if let Some(v) = msgs_a.iter().chain(msgs_b).find(|&&v| v >= modulus) {
        return Err(Error::InvalidArgument(format!("sub-message {v} outside Z_{modulus}")));
    }

    let mut k = Knowledge::new(m, msgs_a, msgs_b, modulus);
    let mut events = Vec::with_capacity(blocks * (m + 2) + m * m);
    let mut emit = |slot: usize, tx: usize, payload: Payload, decodes: Vec<(usize, SubMessageId)>| -> Result<()> {
        let value = k.encode(tx, payload).ok_or_else(|| {
            Error::ProtocolUndefined(format!("{} transmits {payload} before knowing it", node_label(m, tx)))
        })?;
        let mut decoders = Vec::with_capacity(decodes.len());
        for (node, id) in decodes {
            let v = k.decode(node, payload, value, id).ok_or_else(|| {
                Error::ProtocolUndefined(format!("{} cannot strip {payload} to recover {id}", node_label(m, node)))
            })?;
            k.set(node, id, v);
            decoders.push(Decode { node, message: id });
        }
        events.push(ScheduleEvent { slot, phase: m + 2 - tx, tx, payload, value, decoders });
        Ok(())
    };

    for i in 0..m {
        for j in 0..=i {
            emit(i + 1, i - j, Payload { a: Some(j), b: None }, vec![(i - j + 1, a_msg(j))])?;
        }
    }
    for i in 0..blocks {
        let slot = i + m + 1;
        emit(slot, m + 1, Payload { a: None, b: Some(i) }, vec![(m, b_msg(i))])?;
        for j in 0..m {
            let carries_a = i + j < blocks;
            let payload = Payload { a: carries_a.then_some(i + j), b: Some(i) };
            let mut decodes = vec![(m - j - 1, b_msg(i))];
            if carries_a {
                decodes.push((m - j + 1, a_msg(i + j)));
            }
            emit(slot, m - j, payload, decodes)?;
        }
        // Main routine only; termination has no transmission from a.
        if i + m < blocks {
            emit(slot, 0, Payload { a: Some(m + i), b: None }, vec![(1, a_msg(m + i))])?;
        }
    }
    Ok(ScheduleTranscript { m, blocks, modulus, events })
}

/// Replays the transcript from the terminals' messages: every transmitter
/// must know what it sends, every recorded value must match, every decode
/// must be possible, and the terminals must end with the other side's
/// stream, in order.
pub fn verify_delivery(tr: &ScheduleTranscript, msgs_a: &[u64], msgs_b: &[u64]) -> bool {
    let (m, blocks, modulus) = (tr.m, tr.blocks, tr.modulus);
    if m < 2 || modulus < 2 || msgs_a.len() != blocks || msgs_b.len() != blocks {
        return false;
    }
    if msgs_a.iter().chain(msgs_b).any(|&v| v >= modulus) {
        return false;
    }
    let mut k = Knowledge::new(m, msgs_a, msgs_b, modulus);
    let mut at_b = Vec::new();
    let mut at_a = Vec::new();
    for e in &tr.events {
        if e.tx > m + 1 || e.payload.a.is_some_and(|i| i >= blocks) || e.payload.b.is_some_and(|j| j >= blocks) {
            return false;
        }
        if k.encode(e.tx, e.payload) != Some(e.value) {
            return false;
        }
        for d in &e.decoders {
            if d.node == e.tx || d.node > m + 1 || d.message.index >= blocks {
                return false;
            }
            let in_payload = match d.message.source {
                Terminal::A => e.payload.a == Some(d.message.index),
                Terminal::B => e.payload.b == Some(d.message.index),
            };
            if !in_payload {
                return false;
            }
            let Some(v) = k.decode(d.node, e.payload, e.value, d.message) else {
                return false;
            };
            if let Some(prev) = k.get(d.node, d.message) {
                if prev != v {
                    return false;
                }
            }
            k.set(d.node, d.message, v);
            if d.node == m + 1 && d.message.source == Terminal::A {
                at_b.push((d.message.index, v));
            }
            if d.node == 0 && d.message.source == Terminal::B {
                at_a.push((d.message.index, v));
            }
        }
    }
    let in_order = |got: &[(usize, u64)], want: &[u64]| {
        got.len() == want.len() && got.iter().enumerate().all(|(n, &(idx, v))| idx == n && v == want[n])
    };
    in_order(&at_b, msgs_a) && in_order(&at_a, msgs_b)
}

/// Messages held by every node, as sorted index lists `(a-stream, b-stream)`,
/// after the first `n` events of a transcript.
pub fn knowledge_after(tr: &ScheduleTranscript, msgs_a: &[u64], msgs_b: &[u64], n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut k = Knowledge::new(tr.m, msgs_a, msgs_b, tr.modulus);
    for e in tr.events.iter().take(n) {
        for d in &e.decoders {
            if let Some(v) = k.decode(d.node, e.payload, e.value, d.message) {
                k.set(d.node, d.message, v);
            }
        }
    }
    (0..tr.m + 2)
        .map(|node| {
            let a = (0..tr.blocks).filter(|&i| k.a[node][i].is_some()).collect();
            let b = (0..tr.blocks).filter(|&i| k.b[node][i].is_some()).collect();
            (a, b)
        })
        .collect()
}
