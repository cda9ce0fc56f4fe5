use crate::choice::{choose, ChoiceScratch};
use crate::error::Result;
use crate::mechanisms::{MechanismTrace, TraceAction};
use crate::model::{Allocation, BranchId, CadetId, Contract, Instance, PriceLevel, PriorityOrder, Position};
use crate::preference::PreferenceRelation;
use crate::scalar::Scalar;

/// Runs the multi-price cumulative offer mechanism and records its trace.
///
/// `proposal_order` defaults to [`Instance::default_proposal_order`].
pub fn mpco<S: Scalar>(
    instance: &Instance<S>,
    prefs: &[PreferenceRelation],
    proposal_order: Option<&PriorityOrder>,
) -> Result<(Allocation, MechanismTrace)> {
    instance.check_profile(prefs)?;
    let default;
    let order = match proposal_order {
        Some(o) => o,
        None => {
            default = instance.default_proposal_order();
            &default
        }
    };
    let mut trace = MechanismTrace::default();
    let alloc = MpcoRunner::new(instance).run(instance, prefs, order, Some(&mut trace));
    Ok((alloc, trace))
}

/// [`mpco`] without the trace.
pub fn mpco_allocation<S: Scalar>(
    instance: &Instance<S>,
    prefs: &[PreferenceRelation],
    proposal_order: Option<&PriorityOrder>,
) -> Result<Allocation> {
    instance.check_profile(prefs)?;
    let default;
    let order = match proposal_order {
        Some(o) => o,
        None => {
            default = instance.default_proposal_order();
            &default
        }
    };
    Ok(MpcoRunner::new(instance).run(instance, prefs, order, None))
}

/// Cumulative offer procedure with reusable buffers, for running many
/// profiles against one economy.
#[derive(Clone, Debug)]
pub struct MpcoRunner {
    offered: Vec<Vec<(CadetId, PriceLevel)>>,
    held: Vec<Vec<usize>>,
    base: Vec<usize>,
    flex: Vec<usize>,
    chosen: Vec<usize>,
    scratch: ChoiceScratch,
    next: Vec<usize>,
    holding: Vec<Option<Position>>,
}

impl MpcoRunner {
    pub fn new<S: Scalar>(instance: &Instance<S>) -> Self {
        let n = instance.n_cadets();
        let nb = instance.n_branches();
        Self {
            offered: vec![Vec::new(); nb],
            held: vec![Vec::new(); nb],
            base: Vec::new(),
            flex: Vec::new(),
            chosen: Vec::new(),
            scratch: ChoiceScratch::new(n),
            next: vec![0; n],
            holding: vec![None; n],
        }
    }

    /// Runs the procedure. `prefs` must already be valid for `instance`.
    ///
    /// At each step the first cadet in `order` who holds no contract and
    /// still has an unproposed acceptable contract proposes their best such
    /// contract; the branch then holds its choice from everything it has
    /// ever been offered.
    pub fn run<S: Scalar>(
        &mut self,
        instance: &Instance<S>,
        prefs: &[PreferenceRelation],
        order: &PriorityOrder,
        mut trace: Option<&mut MechanismTrace>,
    ) -> Allocation {
        self.offered.iter_mut().for_each(Vec::clear);
        self.held.iter_mut().for_each(Vec::clear);
        self.next.iter_mut().for_each(|x| *x = 0);
        self.holding.iter_mut().for_each(|x| *x = None);

        let mut step = 0;
        while let Some(i) = order
            .iter()
            .find(|&i| self.holding[i.0].is_none() && self.next[i.0] < prefs[i.0].acceptable().len())
        {
            let p = prefs[i.0].acceptable()[self.next[i.0]];
            self.next[i.0] += 1;
            step += 1;
            let b = p.branch;
            let offered = &mut self.offered[b.0];
            offered.push((i, p.price));
            let proposal = offered.len() - 1;
            let contract = |k: usize, offered: &[(CadetId, PriceLevel)]| Contract {
                cadet: offered[k].0,
                branch: b,
                price: offered[k].1,
            };
            if let Some(t) = trace.as_deref_mut() {
                t.push(step, contract(proposal, offered), TraceAction::Proposed);
            }

            let spec = instance.branch(b);
            choose(
                spec.q_base(),
                spec.q_flex,
                instance.priority(b),
                instance.policy(b),
                offered,
                &mut self.scratch,
                &mut self.base,
                &mut self.flex,
            );
            self.chosen.clear();
            self.chosen.extend_from_slice(&self.base);
            self.chosen.extend_from_slice(&self.flex);

            let held = &mut self.held[b.0];
            for &k in held.iter() {
                if !self.chosen.contains(&k) {
                    self.holding[offered[k].0 .0] = None;
                    if let Some(t) = trace.as_deref_mut() {
                        t.push(step, contract(k, offered), TraceAction::Rejected);
                    }
                }
            }
            for &k in &self.chosen {
                if !held.contains(&k) {
                    let (c, t) = offered[k];
                    assert!(
                        self.holding[c.0].is_none(),
                        "cumulative offer: cadet {} held at two branches",
                        c.0
                    );
                    self.holding[c.0] = Some(Position { branch: b, price: t });
                    if let Some(tr) = trace.as_deref_mut() {
                        tr.push(step, contract(k, offered), TraceAction::Held);
                    }
                }
            }
            if !self.chosen.contains(&proposal) {
                if let Some(t) = trace.as_deref_mut() {
                    t.push(step, contract(proposal, offered), TraceAction::Rejected);
                }
            }
            held.clear();
            held.extend_from_slice(&self.chosen);
        }
        Allocation::from_assignments(self.holding.clone())
    }

    /// Contracts ever offered to `b` in the last run.
    pub fn offered_to(&self, b: BranchId) -> impl Iterator<Item = Contract> + '_ {
        self.offered[b.0].iter().map(move |&(cadet, price)| Contract {
            cadet,
            branch: b,
            price,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::cmp_choice;
    use crate::mechanisms::TraceEvent;
    use crate::model::{PolicySpec, PriceLadder};

    // Example B.1 with cadets in priority order i6 i5 i4 i3 i2 i1 j1 j2.
    fn example_b1() -> (Instance<f64>, Vec<PreferenceRelation>) {
        let inst = Instance::anonymous(
            8,
            &[(6, 3)],
            PriceLadder::uniform(2).unwrap(),
            vec![PriorityOrder::identity(8)],
            vec![PolicySpec::Ultimate],
        )
        .unwrap();
        let willing = [false, true, false, true, false, true, true, false];
        let prefs = willing
            .iter()
            .map(|&w| PreferenceRelation::prefix(0, if w { 2 } else { 1 }))
            .collect();
        (inst, prefs)
    }

    #[test]
    fn example_b1_allocation() {
        let (inst, prefs) = example_b1();
        let (alloc, trace) = mpco(&inst, &prefs, None).unwrap();
        let got: Vec<Option<usize>> = alloc.assignments().iter().map(|a| a.map(|p| p.price.0)).collect();
        assert_eq!(got, vec![Some(0), Some(0), Some(0), Some(0), None, Some(1), Some(1), None]);
        assert_eq!(trace.replay(8), alloc);
        // the terminal offer set yields the same selection
        let offered: Vec<Contract> = MpcoRunner::offered_snapshot(&inst, &prefs);
        let r = cmp_choice(BranchId(0), inst.branch(BranchId(0)), inst.priority(BranchId(0)), inst.policy(BranchId(0)), &offered).unwrap();
        let from_choice = Allocation::from_contracts(8, r.selected().copied()).unwrap();
        assert_eq!(from_choice, alloc);
    }

    impl MpcoRunner {
        fn offered_snapshot(inst: &Instance<f64>, prefs: &[PreferenceRelation]) -> Vec<Contract> {
            let mut r = MpcoRunner::new(inst);
            r.run(inst, prefs, &inst.default_proposal_order(), None);
            r.offered_to(BranchId(0)).collect()
        }
    }

    #[test]
    fn nobody_acceptable_gives_empty_allocation() {
        let (inst, _) = example_b1();
        let prefs = vec![PreferenceRelation::unmatched_only(); 8];
        let (alloc, trace) = mpco(&inst, &prefs, None).unwrap();
        assert_eq!(alloc, Allocation::empty(8));
        assert!(trace.events.is_empty());
    }

    #[test]
    fn trace_logs_every_proposal() {
        let (inst, prefs) = example_b1();
        let (_, trace) = mpco(&inst, &prefs, None).unwrap();
        let proposals = trace
            .events
            .iter()
            .filter(|e: &&TraceEvent| e.action == TraceAction::Proposed)
            .count();
        assert_eq!(proposals, trace.steps());
    }

    #[test]
    fn invalid_profile_is_rejected() {
        let (inst, mut prefs) = example_b1();
        prefs[0] = PreferenceRelation::new(vec![Position::new(0, 1)]);
        assert!(mpco(&inst, &prefs, None).is_err());
    }
}
