/// Insertion-ordered candidate set supporting suffix-retention deletion.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateBuffer {
    elements: Vec<usize>,
}

impl CandidateBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.elements
    }

    pub fn extend_from_slice(&mut self, block: &[usize]) {
        debug_assert!(block.iter().all(|e| !self.elements.contains(e)));
        self.elements.extend_from_slice(block);
    }

    pub fn push(&mut self, e: usize) {
        debug_assert!(!self.elements.contains(&e));
        self.elements.push(e);
    }

    /// Keeps only the `keep` most recently added elements, in order.
    pub fn retain_suffix(&mut self, keep: usize) {
        let len = self.elements.len();
        if keep < len {
            self.elements.drain(..len - keep);
        }
    }

    /// The `count` most recently added elements (all of them if fewer).
    pub fn suffix(&self, count: usize) -> &[usize] {
        &self.elements[self.elements.len().saturating_sub(count)..]
    }

    /// `self ∪ block` in insertion order, without modifying the buffer.
    pub fn with(&self, block: &[usize]) -> Vec<usize> {
        let mut v = Vec::with_capacity(self.elements.len() + block.len());
        v.extend_from_slice(&self.elements);
        v.extend_from_slice(block);
        v
    }
}
