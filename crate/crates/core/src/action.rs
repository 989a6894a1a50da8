//! Transfer actions and the negotiation between what a source offers and
//! what a target asks for.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A single transfer action.
///
/// `Copy` leaves the source data intact; `Move` deletes it from the source
/// once the destination has confirmed the transfer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Copy,
    Move,
}

impl Action {
    pub const ALL: [Action; 2] = [Action::Copy, Action::Move];

    fn bit(self) -> u8 {
        match self {
            Action::Copy => 0b01,
            Action::Move => 0b10,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Copy => f.write_str("Copy"),
            Action::Move => f.write_str("Move"),
        }
    }
}

/// A subset of {Copy, Move}. The empty set means "no action".
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ActionSet(u8);

impl ActionSet {
    pub const NONE: ActionSet = ActionSet(0);
    pub const COPY: ActionSet = ActionSet(0b01);
    pub const MOVE: ActionSet = ActionSet(0b10);
    pub const COPY_OR_MOVE: ActionSet = ActionSet(0b11);

    /// All four subsets, in bit order.
    pub const ALL: [ActionSet; 4] = [Self::NONE, Self::COPY, Self::MOVE, Self::COPY_OR_MOVE];

    pub fn contains(self, action: Action) -> bool {
        self.0 & action.bit() != 0
    }

    pub fn insert(&mut self, action: Action) {
        self.0 |= action.bit();
    }

    pub fn with(mut self, action: Action) -> Self {
        self.insert(action);
        self
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Action> {
        Action::ALL.into_iter().filter(move |a| self.contains(*a))
    }

    /// The action a drag shows before any target has expressed a choice.
    /// Move wins when both are offered, matching the usual unmodified-drag
    /// default of desktop toolkits.
    pub fn primary(self) -> Option<Action> {
        if self.contains(Action::Move) {
            Some(Action::Move)
        } else if self.contains(Action::Copy) {
            Some(Action::Copy)
        } else {
            None
        }
    }
}

impl From<Action> for ActionSet {
    fn from(a: Action) -> Self {
        ActionSet(a.bit())
    }
}

impl FromIterator<Action> for ActionSet {
    fn from_iter<I: IntoIterator<Item = Action>>(iter: I) -> Self {
        iter.into_iter().fold(ActionSet::NONE, ActionSet::with)
    }
}

impl fmt::Display for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.iter().map(|a| a.to_string()).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

impl Serialize for ActionSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ActionSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let actions = Vec::<Action>::deserialize(d)?;
        Ok(actions.into_iter().collect())
    }
}

/// Outcome of matching a target's requested action against the source's
/// offer. A rejection is a value, not an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Negotiation {
    Agreed(Action),
    Rejected,
}

impl Negotiation {
    pub fn agreed(self) -> Option<Action> {
        match self {
            Negotiation::Agreed(a) => Some(a),
            Negotiation::Rejected => None,
        }
    }
}

/// The source performs whichever action the target requests, provided it
/// offered that action.
pub fn negotiate_action(source_actions: ActionSet, target_choice: Action) -> Negotiation {
    if source_actions.contains(target_choice) {
        Negotiation::Agreed(target_choice)
    } else {
        Negotiation::Rejected
    }
}
