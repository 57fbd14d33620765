//! The composed simultaneous-message protocol for `HAM_{n,d}`.
//!
//! Each party sends `(m_1, m_2)`: `m_1` is the inner-protocol message for P1
//! (bucket reduction to `16 d^2` bits, then syndromes), `m_2` the gap-test
//! messages for P2. The referee answers `LE` only if both subprotocols do.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::bucket::{bucket_count, pad_length, partition_for_seed, reduce_string, BucketPartition};
use crate::error::{invalid, violation, Error, Result};
use crate::field::FieldContext;
use crate::gap_test::{gap_message_pair, gap_messages, majority_referee, GapMessage, GapTestParams, ZSampling, DEFAULT_GAMMA};
use crate::inner_code::{inner_decide, inner_reference, syndrome_bits, syndrome_message, SyndromeMessage};
use crate::instance::Verdict;

pub const TRANSCRIPT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerVariant {
    #[default]
    Syndrome,
    Reference,
}

impl std::str::FromStr for InnerVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "syndrome" => Ok(InnerVariant::Syndrome),
            "reference" => Ok(InnerVariant::Reference),
            other => Err(invalid(format!("unknown inner variant {other:?}"))),
        }
    }
}

impl std::fmt::Display for InnerVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InnerVariant::Syndrome => "syndrome",
            InnerVariant::Reference => "reference",
        })
    }
}

/// Which P1 path ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `16 d^2 < n`: bucket reduction, then the inner protocol on `16 d^2` bits.
    Reduced,
    /// `16 d^2 >= n`: inner protocol on the unreduced strings.
    DirectInner,
    /// Direct branch where sending the raw string is no longer than the syndromes.
    SmallN,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub gamma: usize,
    pub reps: usize,
    pub inner: InnerVariant,
    pub sampling: ZSampling,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig { gamma: DEFAULT_GAMMA, reps: 1, inner: InnerVariant::Syndrome, sampling: ZSampling::Dense }
    }
}

impl ProtocolConfig {
    pub fn gap_params(&self, d: usize) -> Result<GapTestParams> {
        Ok(GapTestParams::new(d, self.gamma, self.reps)?.with_sampling(self.sampling))
    }
}

/// Everything derivable from public information: lengths, threshold, config, seed.
#[derive(Debug, Clone)]
pub struct PublicSetup {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub branch: Branch,
    pub inner: InnerVariant,
    pub gap: GapTestParams,
    /// Length of the strings P1 works on (`16 d^2`, or `n` padded to at least 2).
    pub inner_len: usize,
    partition: Option<BucketPartition>,
    field: Option<FieldContext>,
}

impl PublicSetup {
    pub fn new(n: usize, d: usize, config: &ProtocolConfig, seed: u64) -> Result<Self> {
        if n < 1 {
            return Err(invalid("n must be at least 1"));
        }
        if d < 1 || d > n {
            return Err(invalid(format!("threshold d={d} outside 1..={n}")));
        }
        let gap = config.gap_params(d)?;
        let buckets = bucket_count(d);
        let (branch, inner_len, partition) = if buckets < n {
            let part = partition_for_seed(pad_length(n, d), d, seed)?;
            (Branch::Reduced, buckets, Some(part))
        } else {
            let len = n.max(2);
            let w = crate::field::degree_for(len) as usize;
            let branch = if config.inner == InnerVariant::Syndrome && len > 2 * d * w { Branch::DirectInner } else { Branch::SmallN };
            (branch, len, None)
        };
        let field = match (branch, config.inner) {
            (Branch::SmallN, _) | (_, InnerVariant::Reference) => None,
            _ => Some(FieldContext::new(inner_len)?),
        };
        Ok(PublicSetup { n, d, seed, branch, inner: config.inner, gap, inner_len, partition, field })
    }

    pub fn partition(&self) -> Option<&BucketPartition> {
        self.partition.as_ref()
    }

    pub fn field(&self) -> Option<&FieldContext> {
        self.field.as_ref()
    }

    /// Whether P1 sends syndromes (otherwise the whole P1 string).
    pub fn sends_syndromes(&self) -> bool {
        self.field.is_some()
    }

    /// Bits of P1 per party.
    pub fn p1_bits(&self) -> usize {
        match &self.field {
            Some(ctx) => syndrome_bits(self.d, ctx),
            None => self.inner_len,
        }
    }

    /// Closed-form bits per party.
    pub fn bits_per_party(&self) -> usize {
        self.gap.bits_per_party() + self.p1_bits()
    }

    /// The string P1 operates on for one party.
    pub fn p1_string(&self, s: &BitString) -> Result<BitString> {
        if s.len() != self.n {
            return Err(Error::LengthMismatch { left: s.len(), right: self.n });
        }
        match &self.partition {
            Some(part) => reduce_string(s, part),
            None => Ok(s.zero_padded(self.inner_len)),
        }
    }

    /// The P1 part of a party message for input `s`.
    pub fn p1_message(&self, s: &BitString) -> Result<InnerMessage> {
        let reduced = self.p1_string(s)?;
        Ok(match &self.field {
            Some(ctx) => InnerMessage::Syndrome(syndrome_message(&reduced, ctx, self.d)?),
            None => InnerMessage::Full(reduced),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerMessage {
    Syndrome(SyndromeMessage),
    Full(BitString),
}

impl InnerMessage {
    pub fn bits(&self, setup: &PublicSetup) -> usize {
        match (self, setup.field()) {
            (InnerMessage::Syndrome(s), Some(ctx)) => s.bits(ctx),
            (InnerMessage::Syndrome(s), None) => s.elems.len() * 32,
            (InnerMessage::Full(b), _) => b.len(),
        }
    }
}

/// One party's whole message `(m_1, m_2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyMessage {
    pub p1: InnerMessage,
    pub p2: Vec<GapMessage>,
}

impl PartyMessage {
    pub fn bits(&self, setup: &PublicSetup) -> usize {
        self.p1.bits(setup) + self.p2.iter().map(|m| m.bits.len()).sum::<usize>()
    }
}

/// Message of a party holding `s`. Uses nothing but `s` and public data.
pub fn party_message(s: &BitString, setup: &PublicSetup) -> Result<PartyMessage> {
    Ok(PartyMessage { p1: setup.p1_message(s)?, p2: gap_messages(s, &setup.gap, setup.seed) })
}

/// `LE` iff both subprotocols say `LE`.
pub fn referee_combine(r1: Verdict, r2: Verdict) -> Verdict {
    if r1 == Verdict::Le && r2 == Verdict::Le {
        Verdict::Le
    } else {
        Verdict::Gt
    }
}

pub fn p1_referee(a: &InnerMessage, b: &InnerMessage, setup: &PublicSetup) -> Result<Verdict> {
    match (a, b, setup.field()) {
        (InnerMessage::Syndrome(sa), InnerMessage::Syndrome(sb), Some(ctx)) => inner_decide(sa, sb, ctx, setup.d),
        (InnerMessage::Full(fa), InnerMessage::Full(fb), None) => {
            if fa.len() != setup.inner_len || fb.len() != setup.inner_len {
                return Err(violation(format!("full P1 messages must have {} bits", setup.inner_len)));
            }
            inner_reference(fa, fb, setup.d)
        }
        _ => Err(violation("P1 message kinds do not match the public setup")),
    }
}

/// Referee: `(r1, r2, final)` from the two messages and public data alone.
pub fn referee(a: &PartyMessage, b: &PartyMessage, setup: &PublicSetup) -> Result<(Verdict, Verdict, Verdict)> {
    let r1 = p1_referee(&a.p1, &b.p1, setup)?;
    let r2 = majority_referee(&a.p2, &b.p2, &setup.gap)?;
    Ok((r1, r2, referee_combine(r1, r2)))
}

/// One execution record. Field order is the serialized order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub version: u32,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub branch: Branch,
    pub inner: InnerVariant,
    pub alice_bits: usize,
    pub bob_bits: usize,
    pub r1: Verdict,
    pub r2: Verdict,
    #[serde(rename = "final")]
    pub final_verdict: Verdict,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcript serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: Transcript = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        if t.version != TRANSCRIPT_VERSION {
            return Err(Error::Malformed(format!("unsupported transcript version {}", t.version)));
        }
        Ok(t)
    }
}

/// A run together with the messages that produced it.
#[derive(Debug, Clone)]
pub struct Execution {
    pub setup: PublicSetup,
    pub alice: PartyMessage,
    pub bob: PartyMessage,
    pub transcript: Transcript,
}

/// Runs the protocol and keeps both messages.
///
/// Gap messages for the two parties are computed in one pass over the public
/// vectors; the result is identical to calling [`party_message`] per party.
pub fn execute(x: &BitString, y: &BitString, d: usize, config: &ProtocolConfig, seed: u64) -> Result<Execution> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    let setup = PublicSetup::new(x.len(), d, config, seed)?;
    let mut a2 = Vec::with_capacity(setup.gap.reps);
    let mut b2 = Vec::with_capacity(setup.gap.reps);
    for rep in 0..setup.gap.reps {
        let (ma, mb) = gap_message_pair(x, y, &setup.gap, seed, rep)?;
        a2.push(ma);
        b2.push(mb);
    }
    let alice = PartyMessage { p1: setup.p1_message(x)?, p2: a2 };
    let bob = PartyMessage { p1: setup.p1_message(y)?, p2: b2 };
    let (r1, r2, final_verdict) = referee(&alice, &bob, &setup)?;
    let transcript = Transcript {
        version: TRANSCRIPT_VERSION,
        seed,
        n: setup.n,
        d,
        branch: setup.branch,
        inner: setup.inner,
        alice_bits: alice.bits(&setup),
        bob_bits: bob.bits(&setup),
        r1,
        r2,
        final_verdict,
    };
    Ok(Execution { setup, alice, bob, transcript })
}

pub fn run_protocol(x: &BitString, y: &BitString, d: usize, config: &ProtocolConfig, seed: u64) -> Result<Transcript> {
    execute(x, y, d, config, seed).map(|e| e.transcript)
}

/// P1 alone (no gap test): reduction plus inner protocol.
pub fn run_p1(x: &BitString, y: &BitString, d: usize, config: &ProtocolConfig, seed: u64) -> Result<Verdict> {
    let setup = PublicSetup::new(x.len(), d, config, seed)?;
    p1_referee(&setup.p1_message(x)?, &setup.p1_message(y)?, &setup)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Cost {
    pub alice_bits: usize,
    pub bob_bits: usize,
    pub total: usize,
}

pub fn cost_of(t: &Transcript) -> Cost {
    Cost { alice_bits: t.alice_bits, bob_bits: t.bob_bits, total: t.alice_bits + t.bob_bits }
}

/// Closed-form bits per party for `(n, d, config)`.
pub fn expected_bits_per_party(n: usize, d: usize, config: &ProtocolConfig) -> Result<usize> {
    Ok(PublicSetup::new(n, d, config, 0)?.bits_per_party())
}
