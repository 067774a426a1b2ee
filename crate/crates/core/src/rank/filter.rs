//! Restricting rankings to lawyers practising in the asker's city.

use log::warn;

use super::list::{AnswerRanking, RankedList};
use crate::index::IndexedCollection;

#[derive(Debug, Clone, PartialEq)]
pub struct Filtered<T> {
    pub result: T,
    /// The city is not known to the index at all; `result` is empty.
    pub unknown_city: bool,
}

pub trait CityFilter: Sized {
    fn retain_city(&self, city: &str, index: &IndexedCollection) -> Self;
    fn cleared(&self) -> Self;
}

impl CityFilter for RankedList {
    fn retain_city(&self, city: &str, index: &IndexedCollection) -> Self {
        let mut out = self.clone();
        out.entries.retain(|e| {
            index
                .lawyer(&e.lawyer_id)
                .is_some_and(|l| index.lawyer_city(l) == city)
        });
        out
    }

    fn cleared(&self) -> Self {
        Self {
            entries: Vec::new(),
            ..self.clone()
        }
    }
}

impl CityFilter for AnswerRanking {
    fn retain_city(&self, city: &str, index: &IndexedCollection) -> Self {
        let mut out = self.clone();
        out.entries
            .retain(|e| index.doc(&e.doc_id).is_some_and(|d| index.doc_city(d) == city));
        out
    }

    fn cleared(&self) -> Self {
        Self {
            entries: Vec::new(),
            ..self.clone()
        }
    }
}

/// Drops entries whose lawyer (or answer author) is not in `asker_city`,
/// preserving order.
pub fn filter_by_city<T: CityFilter>(rl: &T, asker_city: &str, index: &IndexedCollection) -> Filtered<T> {
    if !index.has_city(asker_city) {
        warn!("city {asker_city:?} is unknown to the index; filtered ranking is empty");
        return Filtered {
            result: rl.cleared(),
            unknown_city: true,
        };
    }
    Filtered {
        result: rl.retain_city(asker_city, index),
        unknown_city: false,
    }
}
