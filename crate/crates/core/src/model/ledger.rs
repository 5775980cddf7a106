//! Transcript accounting: who sent how many bits, and in how many rounds.

use std::fmt;

use super::quant::{index_bits, Quantizer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Alice => f.write_str("alice"),
            Party::Bob => f.write_str("bob"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub speaker: Party,
    pub bits: u64,
    pub label: String,
}

/// Per-trial communication meter. Append-only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CostLedger {
    bits_alice: u64,
    bits_bob: u64,
    rounds: u64,
    messages: Vec<Message>,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn send(&mut self, speaker: Party, bits: u64, label: impl Into<String>) {
        match self.messages.last() {
            Some(last) if last.speaker == speaker => {}
            _ => self.rounds += 1,
        }
        match speaker {
            Party::Alice => self.bits_alice += bits,
            Party::Bob => self.bits_bob += bits,
        }
        self.messages.push(Message {
            speaker,
            bits,
            label: label.into(),
        });
    }

    /// Records `count` domain elements from a domain of size `domain`.
    pub fn send_indices(&mut self, speaker: Party, count: usize, domain: usize, label: impl Into<String>) {
        self.send(speaker, count as u64 * index_bits(domain), label);
    }

    /// Records `count` reals encoded with `quantizer`.
    pub fn send_reals(&mut self, speaker: Party, count: usize, quantizer: &Quantizer, label: impl Into<String>) {
        self.send(speaker, count as u64 * quantizer.bits(), label);
    }

    /// Appends another transcript, prefixing its labels.
    pub fn extend(&mut self, other: &CostLedger, prefix: &str) {
        for m in &other.messages {
            let label = if prefix.is_empty() {
                m.label.clone()
            } else {
                format!("{prefix}/{}", m.label)
            };
            self.send(m.speaker, m.bits, label);
        }
    }

    pub fn bits_alice(&self) -> u64 {
        self.bits_alice
    }

    pub fn bits_bob(&self) -> u64 {
        self.bits_bob
    }

    pub fn total_bits(&self) -> u64 {
        self.bits_alice + self.bits_bob
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    /// Total bits over messages whose label contains `needle`.
    pub fn bits_labelled(&self, needle: &str) -> u64 {
        self.messages
            .iter()
            .filter(|m| m.label.contains(needle))
            .map(|m| m.bits)
            .sum()
    }

    /// Recomputes every counter from the message log.
    pub fn is_consistent(&self) -> bool {
        let sum: u64 = self.messages.iter().map(|m| m.bits).sum();
        let alternations = self
            .messages
            .windows(2)
            .filter(|w| w[0].speaker != w[1].speaker)
            .count() as u64;
        let rounds = if self.messages.is_empty() {
            0
        } else {
            alternations + 1
        };
        sum == self.total_bits() && rounds == self.rounds
    }
}
