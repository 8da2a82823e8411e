//! Ground congruence closure for entity and event identities.

use std::collections::BTreeMap;

use crate::formula::Term;

#[derive(Default, Clone, Debug)]
pub struct Congruence {
    ids: BTreeMap<Term, usize>,
    terms: Vec<Term>,
    parent: Vec<usize>,
}

impl Congruence {
    pub fn new<'a>(equalities: impl IntoIterator<Item = (&'a Term, &'a Term)>) -> Self {
        let mut cc = Congruence::default();
        for (a, b) in equalities {
            let (x, y) = (cc.intern(a), cc.intern(b));
            cc.union(x, y);
        }
        cc.close();
        cc
    }

    fn intern(&mut self, t: &Term) -> usize {
        if let Some(&i) = self.ids.get(t) {
            return i;
        }
        if let Term::Fn(_, args) = t {
            args.iter().for_each(|a| {
                self.intern(a);
            });
        }
        let i = self.terms.len();
        self.ids.insert(t.clone(), i);
        self.terms.push(t.clone());
        self.parent.push(i);
        i
    }

    fn find(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    /// Merges applications whose arguments are pairwise congruent, until
    /// nothing changes.
    fn close(&mut self) {
        loop {
            let mut changed = false;
            let mut by_sig: BTreeMap<(String, Vec<usize>), usize> = BTreeMap::new();
            for i in 0..self.terms.len() {
                let Term::Fn(f, args) = &self.terms[i] else { continue };
                if args.is_empty() {
                    continue;
                }
                let sig = (f.clone(), args.iter().map(|a| self.find(self.ids[a])).collect());
                match by_sig.get(&sig) {
                    Some(&j) => changed |= self.union(i, j),
                    None => {
                        by_sig.insert(sig, i);
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    /// Whether the closure forces `a = b`.
    pub fn equal(&self, a: &Term, b: &Term) -> bool {
        if a == b {
            return true;
        }
        let mut cc = self.clone();
        let (x, y) = (cc.intern(a), cc.intern(b));
        cc.close();
        cc.find(x) == cc.find(y)
    }
}
