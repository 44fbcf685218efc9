//! The reference universal machine `U`.
//!
//! An input `w` is split into a framed index `ī` and a raw program part `p`.
//! The index selects the machine:
//!
//! * `ε`: the empty machine, which copies `p` to the output.
//! * `"1"`: the swap machine. It reads a frame `p̄'` from `p`, takes the
//!   remaining bits as a new index `i'`, and continues as `U(ī' p')`.
//! * `"0" body` with `|body|` even: a straight-line program of 2-bit opcodes.
//! * anything else is invalid.
//!
//! Only runs that finish with all of `p` consumed are successful.

use serde::{Deserialize, Serialize};

use crate::bitcodec::{read_frame_header, BitSource, BitString, Packed};
use crate::error::{domain, Result};

/// Step and output limits for one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Budget {
    pub max_steps: u64,
    pub max_output: usize,
}

impl Budget {
    pub fn new(max_steps: u64, max_output: usize) -> Result<Self> {
        if max_steps == 0 || max_output == 0 {
            return Err(domain("budget limits must be at least 1"));
        }
        Ok(Self {
            max_steps,
            max_output,
        })
    }

    /// `max_output` bits with the default `4 * max_output^2` step allowance.
    pub fn for_output(max_output: usize) -> Result<Self> {
        let m = max_output as u64;
        Self::new(4 * m * m, max_output)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_steps: 4 * 64 * 64,
            max_output: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    InvalidIndex,
    AbortBudget,
    AbortSemantics,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub output: BitString,
    pub consumed_all: bool,
    pub steps: u64,
    pub status: RunStatus,
}

impl RunOutcome {
    pub fn is_ok(&self) -> bool {
        self.status == RunStatus::Ok
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Opcode {
    /// `00`: append 0.
    Out0,
    /// `01`: append 1.
    Out1,
    /// `10`: append the next unread bit of `p`.
    Cpy,
    /// `11`: append a copy of the whole output.
    Dbl,
}

impl Opcode {
    #[inline]
    fn decode(hi: bool, lo: bool) -> Self {
        match (hi, lo) {
            (false, false) => Opcode::Out0,
            (false, true) => Opcode::Out1,
            (true, false) => Opcode::Cpy,
            (true, true) => Opcode::Dbl,
        }
    }

    pub fn bits(self) -> [bool; 2] {
        match self {
            Opcode::Out0 => [false, false],
            Opcode::Out1 => [false, true],
            Opcode::Cpy => [true, false],
            Opcode::Dbl => [true, true],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MachineKind {
    Identity,
    Swap,
    Program(Vec<Opcode>),
    Invalid,
}

/// Builds the index `"0" ++ opcodes`.
pub fn program_index(ops: &[Opcode]) -> BitString {
    let mut bits = Vec::with_capacity(1 + 2 * ops.len());
    bits.push(false);
    for op in ops {
        bits.extend_from_slice(&op.bits());
    }
    BitString::from_bits(bits)
}

/// The swap machine's index, `"1"`.
pub fn swap_index() -> BitString {
    BitString::from_bits(vec![true])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Identity,
    Swap,
    Program,
    Invalid,
}

#[inline]
fn kind_of<B: BitSource>(i: B) -> Kind {
    match i.bit_len() {
        0 => Kind::Identity,
        1 if i.bit(0) => Kind::Swap,
        n if !i.bit(0) && n % 2 == 1 => Kind::Program,
        _ => Kind::Invalid,
    }
}

pub fn parse_index(i: &BitString) -> MachineKind {
    let bits = i.bits();
    match kind_of(bits) {
        Kind::Identity => MachineKind::Identity,
        Kind::Swap => MachineKind::Swap,
        Kind::Invalid => MachineKind::Invalid,
        Kind::Program => MachineKind::Program(
            bits[1..]
                .chunks_exact(2)
                .map(|c| Opcode::decode(c[0], c[1]))
                .collect(),
        ),
    }
}

/// Output accumulator the interpreter writes into.
pub(crate) trait Sink {
    fn len(&self) -> usize;
    fn push(&mut self, bit: bool);
    fn double(&mut self);
}

impl Sink for Vec<bool> {
    #[inline]
    fn len(&self) -> usize {
        Vec::len(self)
    }

    #[inline]
    fn push(&mut self, bit: bool) {
        Vec::push(self, bit)
    }

    fn double(&mut self) {
        self.extend_from_within(..);
    }
}

/// Output packed into a word; callers keep `max_output <= 64`.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct PackedSink {
    pub len: u32,
    pub word: u64,
}

impl Sink for PackedSink {
    #[inline]
    fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    fn push(&mut self, bit: bool) {
        self.word = (self.word << 1) | bit as u64;
        self.len += 1;
    }

    #[inline]
    fn double(&mut self) {
        self.word = (self.word << self.len) | self.word;
        self.len *= 2;
    }
}

impl PackedSink {
    pub fn packed(self) -> Packed {
        Packed::new(self.word, self.len)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Exec {
    pub status: RunStatus,
    pub steps: u64,
    pub consumed_all: bool,
}

impl Exec {
    #[inline]
    fn fail(status: RunStatus, steps: u64) -> Self {
        Self {
            status,
            steps,
            consumed_all: false,
        }
    }
}

/// Runs machine `index` on program part `data`.
pub(crate) fn exec<B: BitSource, S: Sink>(
    mut index: B,
    mut data: B,
    budget: Budget,
    out: &mut S,
) -> Exec {
    let mut steps: u64 = 0;
    loop {
        match kind_of(index) {
            Kind::Invalid => return Exec::fail(RunStatus::InvalidIndex, steps),
            Kind::Identity => {
                let n = data.bit_len();
                steps += n as u64;
                if n > budget.max_output || steps > budget.max_steps {
                    return Exec::fail(RunStatus::AbortBudget, steps);
                }
                for j in 0..n {
                    out.push(data.bit(j));
                }
                return Exec {
                    status: RunStatus::Ok,
                    steps,
                    consumed_all: true,
                };
            }
            Kind::Swap => {
                steps += 1;
                if steps > budget.max_steps {
                    return Exec::fail(RunStatus::AbortBudget, steps);
                }
                let Ok((start, len)) = read_frame_header(data) else {
                    return Exec::fail(RunStatus::AbortSemantics, steps);
                };
                let end = start + len;
                let next_index = data.sub(end, data.bit_len());
                data = data.sub(start, end);
                index = next_index;
            }
            Kind::Program => return exec_program(index, data, budget, out, steps),
        }
    }
}

#[inline]
fn exec_program<B: BitSource, S: Sink>(
    index: B,
    data: B,
    budget: Budget,
    out: &mut S,
    mut steps: u64,
) -> Exec {
    let mut cursor = 0usize;
    let n_ops = (index.bit_len() - 1) / 2;
    for op in 0..n_ops {
        let code = Opcode::decode(index.bit(1 + 2 * op), index.bit(2 + 2 * op));
        let appended = match code {
            Opcode::Out0 | Opcode::Out1 | Opcode::Cpy => 1,
            Opcode::Dbl => {
                if out.len() == 0 {
                    return Exec::fail(RunStatus::AbortSemantics, steps);
                }
                out.len()
            }
        };
        if code == Opcode::Cpy && cursor >= data.bit_len() {
            return Exec::fail(RunStatus::AbortSemantics, steps);
        }
        steps += appended.max(1) as u64;
        if out.len() + appended > budget.max_output || steps > budget.max_steps {
            return Exec::fail(RunStatus::AbortBudget, steps);
        }
        match code {
            Opcode::Out0 => out.push(false),
            Opcode::Out1 => out.push(true),
            Opcode::Cpy => {
                out.push(data.bit(cursor));
                cursor += 1;
            }
            Opcode::Dbl => out.double(),
        }
    }
    if cursor < data.bit_len() {
        return Exec::fail(RunStatus::AbortSemantics, steps);
    }
    Exec {
        status: RunStatus::Ok,
        steps,
        consumed_all: true,
    }
}

/// Executes the two-part code `w = ī p` under `budget`.
pub fn run(w: &BitString, budget: Budget) -> RunOutcome {
    let bits = w.bits();
    let mut out: Vec<bool> = Vec::new();
    let exec = match read_frame_header(bits) {
        Ok((start, len)) => {
            let index = &bits[start..start + len];
            let data = &bits[start + len..];
            exec(index, data, budget, &mut out)
        }
        Err(_) => Exec::fail(RunStatus::InvalidIndex, 0),
    };
    RunOutcome {
        output: BitString::from_bits(out),
        consumed_all: exec.consumed_all,
        steps: exec.steps,
        status: exec.status,
    }
}

/// Runs `ī p` given the index and program part separately.
pub fn run_parts(index: &BitString, p: &BitString, budget: Budget) -> RunOutcome {
    run(&crate::bitcodec::encode_sd(index).concat(p), budget)
}
