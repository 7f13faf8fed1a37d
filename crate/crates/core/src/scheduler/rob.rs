use crate::orbgrand::DecodeResult;

/// Why a decoder was forced to stop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationCause {
    /// An arrival found the input FIFO full.
    Overflow,
    /// The head ROB slot was due at the output but not yet filled.
    OutputDue,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RobSlot {
    Free,
    Booked {
        arrival_index: u64,
        booking_order: u64,
    },
    Filled {
        booking_order: u64,
        result: Box<Filled>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Filled {
    pub result: DecodeResult,
    pub cause: Option<TerminationCause>,
}

/// Re-order buffer used as a circular queue: slots are booked in arrival
/// order and released from the head.
#[derive(Clone, Debug)]
pub struct Rob {
    slots: Vec<RobSlot>,
    head: usize,
    tail: usize,
    occupied: usize,
    bookings: u64,
}

impl Rob {
    pub fn new(size: usize) -> Self {
        Self {
            slots: vec![RobSlot::Free; size],
            head: 0,
            tail: 0,
            occupied: 0,
            bookings: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn occupied(&self) -> usize {
        self.occupied
    }

    pub fn has_free_slot(&self) -> bool {
        self.occupied < self.slots.len()
    }

    pub fn head(&self) -> usize {
        self.head
    }

    pub fn slot(&self, index: usize) -> &RobSlot {
        &self.slots[index]
    }

    /// Total bookings so far; the next booking gets this order number.
    pub fn bookings(&self) -> u64 {
        self.bookings
    }

    /// Reserves the next slot in circular order for `arrival_index`.
    pub fn book(&mut self, arrival_index: u64) -> Option<usize> {
        if !self.has_free_slot() || self.slots[self.tail] != RobSlot::Free {
            return None;
        }
        let slot = self.tail;
        self.slots[slot] = RobSlot::Booked {
            arrival_index,
            booking_order: self.bookings,
        };
        self.bookings += 1;
        self.tail = (self.tail + 1) % self.slots.len();
        self.occupied += 1;
        Some(slot)
    }

    /// Stores a decoded word in its booked slot. Returns false if the slot
    /// was not booked for that codeword.
    pub fn fill(&mut self, slot: usize, result: DecodeResult, cause: Option<TerminationCause>) -> bool {
        match self.slots[slot] {
            RobSlot::Booked {
                arrival_index,
                booking_order,
            } if arrival_index == result.arrival_index => {
                self.slots[slot] = RobSlot::Filled {
                    booking_order,
                    result: Box::new(Filled { result, cause }),
                };
                true
            }
            _ => false,
        }
    }

    pub fn head_is_filled(&self) -> bool {
        matches!(self.slots[self.head], RobSlot::Filled { .. })
    }

    /// Releases the head slot if it is filled.
    pub fn expel(&mut self) -> Option<(usize, Filled)> {
        if !self.head_is_filled() {
            return None;
        }
        let slot = self.head;
        let RobSlot::Filled { result, .. } = std::mem::replace(&mut self.slots[slot], RobSlot::Free) else {
            unreachable!()
        };
        self.head = (self.head + 1) % self.slots.len();
        self.occupied -= 1;
        Some((slot, *result))
    }
}
