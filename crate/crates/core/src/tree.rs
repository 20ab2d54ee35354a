//! Breadth-first refinement bitstream for a single hypertree.
//!
//! Cell `i` (in breadth-first order) carries one bit: 1 if refined, 0 if leaf.
//! Because children are laid out in the same order as their refined parents,
//! the children of the `k`-th refined cell occupy `1 + k·F .. 1 + (k+1)·F`
//! where `F = f^d`. A rank table over 64-bit words makes that lookup O(1).

use std::fmt::Write as _;

const WORD: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperTree {
    words: Vec<u64>,
    len: usize,
    /// Number of 1-bits strictly before each word.
    ranks: Vec<u32>,
    /// First cell index of each depth, followed by `len`.
    level_offsets: Vec<usize>,
    children_per_cell: usize,
}

impl HyperTree {
    /// Builds a tree from its breadth-first bits, validating the per-depth
    /// recurrence `cells(δ+1) = ones(δ) · children_per_cell`.
    pub fn from_bits(bits: &[bool], children_per_cell: usize) -> Result<Self, String> {
        if bits.is_empty() {
            return Err("empty descriptor".into());
        }
        let len = bits.len();
        let mut words = vec![0u64; len.div_ceil(WORD)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / WORD] |= 1 << (i % WORD);
            }
        }
        let mut ranks = Vec::with_capacity(words.len());
        let mut acc = 0u32;
        for w in &words {
            ranks.push(acc);
            acc += w.count_ones();
        }

        let mut level_offsets = vec![0];
        let (mut start, mut count) = (0usize, 1usize);
        loop {
            let end = start + count;
            if end > len {
                return Err(format!(
                    "depth {} needs {} cells but only {} bits remain",
                    level_offsets.len() - 1,
                    count,
                    len - start
                ));
            }
            level_offsets.push(end);
            let ones = bits[start..end].iter().filter(|&&b| b).count();
            if ones == 0 {
                if end != len {
                    return Err(format!("{} trailing bits after the last depth", len - end));
                }
                break;
            }
            start = end;
            count = ones * children_per_cell;
        }

        Ok(Self { words, len, ranks, level_offsets, children_per_cell })
    }

    /// Parses a string of '0'/'1' characters; whitespace is ignored.
    pub fn parse(descriptor: &str, children_per_cell: usize) -> crate::Result<Self> {
        let bits = parse_bits(descriptor)?;
        Self::from_bits(&bits, children_per_cell)
            .map_err(|reason| crate::Error::DescriptorLengthMismatch { tree: 0, reason })
    }

    /// A single unrefined root.
    pub fn leaf(children_per_cell: usize) -> Self {
        Self::from_bits(&[false], children_per_cell).expect("single leaf is valid")
    }

    pub fn cell_count(&self) -> usize {
        self.len
    }

    pub fn children_per_cell(&self) -> usize {
        self.children_per_cell
    }

    /// Deepest depth present in the tree (0 for an unrefined root).
    pub fn depth(&self) -> usize {
        self.level_offsets.len() - 2
    }

    /// Cumulative cell counts: `level_offsets()[δ]` is the first index at depth δ,
    /// the last entry equals `cell_count()`.
    pub fn level_offsets(&self) -> &[usize] {
        &self.level_offsets
    }

    pub fn cells_at_depth(&self, depth: usize) -> usize {
        if depth > self.depth() {
            0
        } else {
            self.level_offsets[depth + 1] - self.level_offsets[depth]
        }
    }

    #[inline]
    pub fn is_refined(&self, index: usize) -> bool {
        debug_assert!(index < self.len);
        self.words[index / WORD] >> (index % WORD) & 1 == 1
    }

    #[inline]
    pub fn is_leaf(&self, index: usize) -> bool {
        !self.is_refined(index)
    }

    /// Number of refined cells strictly before `index`.
    #[inline]
    pub fn rank(&self, index: usize) -> usize {
        let w = index / WORD;
        let r = index % WORD;
        let below = if r == 0 { 0 } else { (self.words[w] << (WORD - r)).count_ones() };
        self.ranks[w] as usize + below as usize
    }

    /// Index of the first child of a refined cell.
    #[inline]
    pub fn first_child(&self, index: usize) -> usize {
        1 + self.rank(index) * self.children_per_cell
    }

    /// Index of child `child` of a refined cell; `None` for leaves or bad child indices.
    pub fn child(&self, index: usize, child: usize) -> Option<usize> {
        if index >= self.len || child >= self.children_per_cell || !self.is_refined(index) {
            return None;
        }
        Some(self.first_child(index) + child)
    }

    /// Parent index and the child slot this cell occupies in it.
    pub fn parent(&self, index: usize) -> Option<(usize, usize)> {
        if index == 0 || index >= self.len {
            return None;
        }
        let k = (index - 1) / self.children_per_cell;
        Some((self.select(k), (index - 1) % self.children_per_cell))
    }

    /// Position of the `k`-th 1-bit (0-based).
    fn select(&self, k: usize) -> usize {
        let w = self.ranks.partition_point(|&r| (r as usize) <= k) - 1;
        let mut word = self.words[w];
        for _ in 0..(k - self.ranks[w] as usize) {
            word &= word - 1;
        }
        w * WORD + word.trailing_zeros() as usize
    }

    pub fn depth_of(&self, index: usize) -> usize {
        self.level_offsets.partition_point(|&o| o <= index) - 1
    }

    pub fn leaf_count(&self) -> usize {
        let ones: usize = self.words.iter().map(|w| w.count_ones() as usize).sum();
        self.len - ones
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.is_refined(i))
    }

    /// Descriptor string with one space between depths, e.g. `"1 0000"`.
    pub fn descriptor_string(&self) -> String {
        let mut s = String::with_capacity(self.len + self.level_offsets.len());
        for (depth, pair) in self.level_offsets.windows(2).enumerate() {
            if depth > 0 {
                s.push(' ');
            }
            for i in pair[0]..pair[1] {
                s.push(if self.is_refined(i) { '1' } else { '0' });
            }
        }
        s
    }
}

/// Parses a '0'/'1' bit string, skipping whitespace.
pub fn parse_bits(s: &str) -> crate::Result<Vec<bool>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(crate::Error::InvalidBitChar { found: other }),
        })
        .collect()
}

pub fn format_bits(bits: impl IntoIterator<Item = bool>) -> String {
    let mut s = String::new();
    for b in bits {
        let _ = s.write_char(if b { '1' } else { '0' });
    }
    s
}
