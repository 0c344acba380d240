//! One-slot transition law of the queue-length chain.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::model::ModelParams;

/// Queue lengths at the start of a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct QueueState {
    pub q1: u64,
    pub q2: u64,
}

impl QueueState {
    pub fn new(q1: u64, q2: u64) -> Self {
        QueueState { q1, q2 }
    }

    pub fn class(&self) -> StateClass {
        match (self.q1 > 0, self.q2 > 0) {
            (false, false) => StateClass::Origin,
            (false, true) => StateClass::OnlySecond,
            (true, false) => StateClass::OnlyFirst,
            (true, true) => StateClass::Interior,
        }
    }
}

/// The kernel only depends on which queues are nonempty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateClass {
    Origin,
    OnlyFirst,
    OnlySecond,
    Interior,
}

impl StateClass {
    pub const ALL: [StateClass; 4] = [
        StateClass::Origin,
        StateClass::OnlyFirst,
        StateClass::OnlySecond,
        StateClass::Interior,
    ];

    pub fn representative(self) -> QueueState {
        match self {
            StateClass::Origin => QueueState::new(0, 0),
            StateClass::OnlyFirst => QueueState::new(1, 0),
            StateClass::OnlySecond => QueueState::new(0, 1),
            StateClass::Interior => QueueState::new(1, 1),
        }
    }

    fn index(self) -> usize {
        match self {
            StateClass::Origin => 0,
            StateClass::OnlyFirst => 1,
            StateClass::OnlySecond => 2,
            StateClass::Interior => 3,
        }
    }
}

/// Accounting label of a kernel branch.
///
/// The compound labels cover the interior branches where both users signal
/// and the two signals act differently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotEvent {
    Idle,
    Collision,
    Success1,
    Success2,
    Drop1,
    Drop2,
    Transfer1to2,
    Transfer2to1,
    BothDrop,
    Swap,
    Transfer1to2Drop2,
    Transfer2to1Drop1,
}

/// Packets moved by one event, per kind.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EventCounts {
    pub success: [u8; 2],
    pub drop: [u8; 2],
    pub transfer_1to2: u8,
    pub transfer_2to1: u8,
}

impl SlotEvent {
    pub fn counts(self) -> EventCounts {
        let mut c = EventCounts::default();
        match self {
            SlotEvent::Idle | SlotEvent::Collision => {}
            SlotEvent::Success1 => c.success[0] = 1,
            SlotEvent::Success2 => c.success[1] = 1,
            SlotEvent::Drop1 => c.drop[0] = 1,
            SlotEvent::Drop2 => c.drop[1] = 1,
            SlotEvent::Transfer1to2 => c.transfer_1to2 = 1,
            SlotEvent::Transfer2to1 => c.transfer_2to1 = 1,
            SlotEvent::BothDrop => c.drop = [1, 1],
            SlotEvent::Swap => {
                c.transfer_1to2 = 1;
                c.transfer_2to1 = 1;
            }
            SlotEvent::Transfer1to2Drop2 => {
                c.transfer_1to2 = 1;
                c.drop[1] = 1;
            }
            SlotEvent::Transfer2to1Drop1 => {
                c.transfer_2to1 = 1;
                c.drop[0] = 1;
            }
        }
        c
    }
}

/// One branch of the kernel: pre-arrival change plus label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotOutcome {
    pub delta1: i8,
    pub delta2: i8,
    pub event: SlotEvent,
    pub prob: f64,
}

/// Exact joint law of the pre-arrival queue change from one state.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SlotDistribution {
    pub outcomes: Vec<SlotOutcome>,
}

impl SlotDistribution {
    fn push(&mut self, delta1: i8, delta2: i8, event: SlotEvent, prob: f64) {
        if prob > 0.0 {
            self.outcomes.push(SlotOutcome {
                delta1,
                delta2,
                event,
                prob,
            });
        }
    }

    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|o| o.prob).sum()
    }

    /// Probabilities merged by queue change.
    pub fn by_delta(&self) -> BTreeMap<(i8, i8), f64> {
        let mut m = BTreeMap::new();
        for o in &self.outcomes {
            *m.entry((o.delta1, o.delta2)).or_insert(0.0) += o.prob;
        }
        m
    }

    pub fn prob_of(&self, delta1: i8, delta2: i8) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| o.delta1 == delta1 && o.delta2 == delta2)
            .map(|o| o.prob)
            .sum()
    }
}

/// How a signal raised by a user with an empty queue is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelVariant {
    /// Only the nonempty user's signal matters on the boundary.
    #[default]
    Explicit,
    /// A signal at the empty user still silences the other user's
    /// transmission.
    GlobalMalfunction,
}

/// Transition law of `state` under the explicit kernel.
pub fn step_kernel(state: QueueState, p: &ModelParams) -> SlotDistribution {
    step_kernel_with(state, p, KernelVariant::Explicit)
}

pub fn step_kernel_with(state: QueueState, p: &ModelParams, variant: KernelVariant) -> SlotDistribution {
    let mut d = SlotDistribution::default();
    match state.class() {
        StateClass::Origin => d.push(0, 0, SlotEvent::Idle, 1.0),
        StateClass::OnlySecond => {
            let (u, other_silent) = (p.user(2), p.user(1).s_bar());
            boundary(&mut d, u, other_silent, variant, false);
        }
        StateClass::OnlyFirst => {
            let (u, other_silent) = (p.user(1), p.user(2).s_bar());
            boundary(&mut d, u, other_silent, variant, true);
        }
        StateClass::Interior => interior(&mut d, p),
    }
    d
}

fn boundary(
    d: &mut SlotDistribution,
    u: crate::model::User,
    other_silent: f64,
    variant: KernelVariant,
    first: bool,
) {
    // deltas written for the busy user = 2, mirrored when user 1 is busy
    let put = |d: &mut SlotDistribution, db: i8, de: i8, ev: SlotEvent, pr: f64| {
        if first {
            d.push(db, de, ev, pr)
        } else {
            d.push(de, db, ev, pr)
        }
    };
    let (transfer, drop, success) = if first {
        (SlotEvent::Transfer1to2, SlotEvent::Drop1, SlotEvent::Success1)
    } else {
        (SlotEvent::Transfer2to1, SlotEvent::Drop2, SlotEvent::Success2)
    };
    let gate = match variant {
        KernelVariant::Explicit => 1.0,
        KernelVariant::GlobalMalfunction => other_silent,
    };
    let sb = u.s_bar();
    put(d, -1, 1, transfer, u.s * u.l_plus);
    put(d, -1, 0, drop, u.s * u.l_minus);
    put(d, -1, 0, success, sb * u.alpha * gate);
    put(d, 0, 0, SlotEvent::Idle, sb * (1.0 - u.alpha * gate));
}

fn interior(d: &mut SlotDistribution, p: &ModelParams) {
    let (a, b) = (p.user(1), p.user(2));
    let (s1, s2, sb1, sb2) = (a.s, b.s, a.s_bar(), b.s_bar());
    let (a1, a2, ab1, ab2) = (a.alpha, b.alpha, a.alpha_bar(), b.alpha_bar());
    let quiet = sb1 * sb2;
    d.push(0, 0, SlotEvent::Idle, quiet * ab1 * ab2);
    d.push(0, 0, SlotEvent::Collision, quiet * a1 * a2);
    d.push(0, 0, SlotEvent::Swap, s1 * s2 * a.l_plus * b.l_plus);
    d.push(-1, 0, SlotEvent::Success1, quiet * a1 * ab2);
    d.push(-1, 0, SlotEvent::Drop1, s1 * sb2 * a.l_minus);
    d.push(-1, 0, SlotEvent::Transfer1to2Drop2, s1 * s2 * a.l_plus * b.l_minus);
    d.push(-1, 1, SlotEvent::Transfer1to2, s1 * sb2 * a.l_plus);
    d.push(0, -1, SlotEvent::Success2, quiet * a2 * ab1);
    d.push(0, -1, SlotEvent::Drop2, s2 * sb1 * b.l_minus);
    d.push(0, -1, SlotEvent::Transfer2to1Drop1, s1 * s2 * b.l_plus * a.l_minus);
    d.push(1, -1, SlotEvent::Transfer2to1, s2 * sb1 * b.l_plus);
    d.push(-1, -1, SlotEvent::BothDrop, s1 * s2 * a.l_minus * b.l_minus);
}

/// Adds the end-of-slot Bernoulli arrivals to a post-kernel state.
pub fn apply_arrivals<R: Rng + ?Sized>(
    state: QueueState,
    deltas: (i8, i8),
    p: &ModelParams,
    rng: &mut R,
) -> QueueState {
    let a1 = (rng.random::<f64>() < p.lambda1) as i64;
    let a2 = (rng.random::<f64>() < p.lambda2) as i64;
    shift(state, deltas, (a1, a2))
}

/// `state + deltas + arrivals`; panics if a queue would go negative.
pub fn shift(state: QueueState, deltas: (i8, i8), arrivals: (i64, i64)) -> QueueState {
    let q1 = state.q1 as i64 + deltas.0 as i64 + arrivals.0;
    let q2 = state.q2 as i64 + deltas.1 as i64 + arrivals.1;
    assert!(q1 >= 0 && q2 >= 0, "kernel moved a queue below zero");
    QueueState::new(q1 as u64, q2 as u64)
}

/// Kernel laws of the four state classes, prepared for sampling.
#[derive(Debug, Clone)]
pub struct KernelTable {
    classes: [Vec<SlotOutcome>; 4],
    cumulative: [Vec<f64>; 4],
}

impl KernelTable {
    pub fn new(p: &ModelParams, variant: KernelVariant) -> Self {
        let classes = StateClass::ALL.map(|c| step_kernel_with(c.representative(), p, variant).outcomes);
        let cumulative = classes.clone().map(|v| {
            let mut acc = 0.0;
            v.iter()
                .map(|o| {
                    acc += o.prob;
                    acc
                })
                .collect()
        });
        KernelTable { classes, cumulative }
    }

    pub fn outcomes(&self, class: StateClass) -> &[SlotOutcome] {
        &self.classes[class.index()]
    }

    /// Inverse-cdf draw of a branch given a uniform `u` in [0,1).
    pub fn pick(&self, class: StateClass, u: f64) -> &SlotOutcome {
        let i = class.index();
        let cum = &self.cumulative[i];
        let total = *cum.last().expect("kernel has at least one branch");
        let target = u * total;
        let k = cum.iter().position(|&c| target < c).unwrap_or(cum.len() - 1);
        &self.classes[i][k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ModelParams {
        ModelParams {
            lambda1: 0.1,
            lambda2: 0.1,
            alpha1: 0.5,
            alpha2: 0.5,
            s1: 0.0,
            s2: 0.0,
            l1_minus: 0.5,
            l1_plus: 0.5,
            l2_minus: 0.5,
            l2_plus: 0.5,
        }
    }

    #[test]
    fn origin_is_idle() {
        let d = step_kernel(QueueState::new(0, 0), &base());
        assert_eq!(d.outcomes.len(), 1);
        assert_eq!(d.outcomes[0].event, SlotEvent::Idle);
        assert_eq!(d.outcomes[0].prob, 1.0);
    }

    #[test]
    fn classical_aloha_interior() {
        let m = step_kernel(QueueState::new(3, 4), &base()).by_delta();
        assert_eq!(m.len(), 3);
        assert!((m[&(0, 0)] - 0.5).abs() < 1e-15);
        assert!((m[&(-1, 0)] - 0.25).abs() < 1e-15);
        assert!((m[&(0, -1)] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn certain_double_deletion() {
        let p = ModelParams {
            s1: 1.0,
            s2: 1.0,
            l1_minus: 1.0,
            l1_plus: 0.0,
            l2_minus: 1.0,
            l2_plus: 0.0,
            ..base()
        };
        let d = step_kernel(QueueState::new(3, 4), &p);
        assert_eq!(d.outcomes.len(), 1);
        assert_eq!((d.outcomes[0].delta1, d.outcomes[0].delta2), (-1, -1));
        assert_eq!(d.outcomes[0].event, SlotEvent::BothDrop);
    }

    #[test]
    fn boundary_example() {
        let p = ModelParams {
            s2: 0.2,
            l2_plus: 0.4,
            l2_minus: 0.6,
            alpha2: 0.5,
            ..base()
        };
        let d = step_kernel(QueueState::new(0, 4), &p);
        let m = d.by_delta();
        assert_eq!(m.len(), 3);
        assert!((m[&(1, -1)] - 0.08).abs() < 1e-15);
        assert!((m[&(0, -1)] - 0.52).abs() < 1e-15);
        assert!((m[&(0, 0)] - 0.40).abs() < 1e-15);
        // the 0.52 splits into signal deletions and clean transmissions
        let drop: f64 = d.outcomes.iter().filter(|o| o.event == SlotEvent::Drop2).map(|o| o.prob).sum();
        assert!((drop - 0.12).abs() < 1e-15);
    }

    #[test]
    fn boundary_mirror() {
        let p = ModelParams {
            s1: 0.3,
            alpha1: 0.7,
            l1_minus: 0.2,
            l1_plus: 0.8,
            ..base()
        };
        let a = step_kernel(QueueState::new(5, 0), &p).by_delta();
        let b = step_kernel(QueueState::new(0, 5), &p.swapped()).by_delta();
        for ((d1, d2), pr) in a {
            assert_eq!(b[&(d2, d1)], pr);
        }
    }

    #[test]
    fn global_malfunction_silences_lone_user() {
        let p = ModelParams {
            s1: 0.4,
            s2: 0.2,
            alpha2: 0.5,
            l2_plus: 0.4,
            l2_minus: 0.6,
            ..base()
        };
        let d = step_kernel_with(QueueState::new(0, 4), &p, KernelVariant::GlobalMalfunction);
        let m = d.by_delta();
        assert!((m[&(1, -1)] - 0.08).abs() < 1e-15);
        assert!((m[&(0, -1)] - (0.12 + 0.8 * 0.5 * 0.6)).abs() < 1e-15);
        assert!((d.total() - 1.0).abs() < 1e-15);
        // the explicit kernel ignores s1 here
        let e = step_kernel(QueueState::new(0, 4), &p).by_delta();
        assert!((e[&(0, -1)] - 0.52).abs() < 1e-15);
    }

    #[test]
    fn arrivals_arithmetic() {
        assert_eq!(shift(QueueState::new(0, 0), (0, 0), (1, 0)), QueueState::new(1, 0));
        assert_eq!(shift(QueueState::new(2, 3), (-1, 1), (0, 1)), QueueState::new(1, 5));
    }

    #[test]
    fn table_pick_covers_branches() {
        let p = ModelParams {
            s1: 0.3,
            s2: 0.2,
            ..base()
        };
        let t = KernelTable::new(&p, KernelVariant::Explicit);
        let out = t.outcomes(StateClass::Interior);
        assert_eq!(t.pick(StateClass::Interior, 0.0).event, out[0].event);
        assert_eq!(t.pick(StateClass::Interior, 0.999_999_999).event, out.last().unwrap().event);
    }
}
