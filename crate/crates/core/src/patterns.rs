//! Excursions, block extensions, level partitions and the graph controller.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{EdgeId, Graph, GraphError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PatternError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("block is empty")]
    EmptyBlock,
    #[error("block length {len} shorter than M = {m}")]
    TooShort { m: usize, len: usize },
    #[error("M must be at least 1")]
    ZeroM,
    #[error("block is not an excursion: {0} and {1} share no vertex")]
    Broken(EdgeId, EdgeId),
    #[error("edge {0} cannot reach the pattern")]
    Leftover(EdgeId),
}

pub fn is_excursion(g: &Graph, seq: &[EdgeId]) -> Result<bool, PatternError> {
    for &e in seq {
        g.edge(e)?;
    }
    for w in seq.windows(2) {
        if !g.shares_vertex(w[0], w[1])? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn m_block_extension(seq: &[EdgeId], m: usize) -> Result<Vec<Vec<EdgeId>>, PatternError> {
    if m == 0 {
        return Err(PatternError::ZeroM);
    }
    if m > seq.len() {
        return Err(PatternError::TooShort { m, len: seq.len() });
    }
    Ok(seq.windows(m).map(|w| w.to_vec()).collect())
}

/// Breadth-first level partition of the edges around a cyclic block.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternLevels {
    block: Vec<EdgeId>,
    levels: Vec<Vec<EdgeId>>,
    level_of: BTreeMap<EdgeId, usize>,
    leftover: BTreeSet<EdgeId>,
    down: BTreeMap<EdgeId, EdgeId>,
}

pub fn build_levels(g: &Graph, block: &[EdgeId]) -> Result<PatternLevels, PatternError> {
    let (&first, &last) = block
        .first()
        .zip(block.last())
        .ok_or(PatternError::EmptyBlock)?;
    for &e in block {
        g.edge(e)?;
    }
    for w in block.windows(2) {
        if !g.shares_vertex(w[0], w[1])? {
            return Err(PatternError::Broken(w[0], w[1]));
        }
    }
    if !g.shares_vertex(last, first)? {
        return Err(PatternError::Broken(last, first));
    }

    // E^0 in block order, repeats collapsed to their first position.
    let mut level0 = Vec::new();
    for &e in block {
        if !level0.contains(&e) {
            level0.push(e);
        }
    }
    let mut level_of: BTreeMap<EdgeId, usize> = level0.iter().map(|&e| (e, 0)).collect();
    let mut levels = vec![level0];
    let mut down = BTreeMap::new();
    loop {
        let prev = levels.last().expect("at least one level");
        let mut next = Vec::new();
        for e in g.edge_ids() {
            if level_of.contains_key(&e) {
                continue;
            }
            for &f in prev {
                if g.shares_vertex(e, f)? {
                    down.insert(e, f);
                    next.push(e);
                    break;
                }
            }
        }
        if next.is_empty() {
            break;
        }
        let p = levels.len();
        for &e in &next {
            level_of.insert(e, p);
        }
        levels.push(next);
    }
    let leftover = g.edge_ids().filter(|e| !level_of.contains_key(e)).collect();
    Ok(PatternLevels {
        block: block.to_vec(),
        levels,
        level_of,
        leftover,
        down,
    })
}

impl PatternLevels {
    pub fn block(&self) -> &[EdgeId] {
        &self.block
    }

    pub fn levels(&self) -> &[Vec<EdgeId>] {
        &self.levels
    }

    /// Index of the deepest level, `P`.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level_of(&self, e: EdgeId) -> Option<usize> {
        self.level_of.get(&e).copied()
    }

    pub fn leftover(&self) -> &BTreeSet<EdgeId> {
        &self.leftover
    }

    fn block_position(&self, e: EdgeId) -> Option<usize> {
        self.block.iter().position(|&b| b == e)
    }

    /// Least legal successor. A repeated block edge uses its first position.
    pub fn successor(&self, e: EdgeId) -> Result<EdgeId, PatternError> {
        match self.level_of(e) {
            None => Err(PatternError::Leftover(e)),
            Some(0) => {
                let k = self.block_position(e).expect("level-0 edges are in the block");
                Ok(self.block[(k + 1) % self.block.len()])
            }
            Some(_) => Ok(self.down[&e]),
        }
    }

    pub fn steps_to_pattern(&self, start: EdgeId) -> Result<usize, PatternError> {
        self.level_of(start).ok_or(PatternError::Leftover(start))
    }

    /// `start` followed by `n` controller steps. Inside the block the walk
    /// follows block positions, so repeated block edges are replayed in order.
    pub fn iterate(&self, start: EdgeId, n: usize) -> Result<Vec<EdgeId>, PatternError> {
        let mut out = vec![start];
        let mut cur = start;
        let mut pos: Option<usize> = None;
        for _ in 0..n {
            let next = match pos {
                Some(k) => {
                    let k = (k + 1) % self.block.len();
                    pos = Some(k);
                    self.block[k]
                }
                None => {
                    let next = self.successor(cur)?;
                    if self.level_of(cur) == Some(0) {
                        let k = self.block_position(cur).expect("block edge");
                        pos = Some((k + 1) % self.block.len());
                    } else if self.level_of(next) == Some(0) {
                        pos = self.block_position(next);
                    }
                    next
                }
            };
            out.push(next);
            cur = next;
        }
        Ok(out)
    }
}

/// The graph controller `G`, one step of the least legal successor.
pub fn graph_controller(levels: &PatternLevels, e: EdgeId) -> Result<EdgeId, PatternError> {
    levels.successor(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> EdgeId {
        EdgeId(i)
    }

    #[test]
    fn excursions() {
        let y = Graph::y_graph();
        assert!(is_excursion(&y, &[e(1), e(2), e(3)]).unwrap());
        assert!(is_excursion(&y, &[e(1)]).unwrap());
        // H-graph: junctions 0 and 10 joined by bridge 7.
        let h = Graph::from_triples(&[
            (1, 0, 1),
            (2, 0, 2),
            (7, 0, 10),
            (11, 10, 11),
            (12, 10, 12),
        ])
        .unwrap();
        assert!(!is_excursion(&h, &[e(1), e(11)]).unwrap());
        assert!(is_excursion(&y, &[e(4)]).is_err());
    }

    #[test]
    fn blocks() {
        let b = m_block_extension(&[e(1), e(2), e(1), e(2)], 2).unwrap();
        assert_eq!(b, vec![vec![e(1), e(2)], vec![e(2), e(1)], vec![e(1), e(2)]]);
        assert_eq!(m_block_extension(&[e(1), e(2)], 1).unwrap().len(), 2);
        assert!(m_block_extension(&[e(1)], 2).is_err());
    }

    #[test]
    fn y_levels() {
        let y = Graph::y_graph();
        let lv = build_levels(&y, &[e(1), e(2)]).unwrap();
        assert_eq!(lv.levels(), &[vec![e(1), e(2)], vec![e(3)]]);
        assert!(lv.leftover().is_empty());
        assert_eq!(lv.successor(e(1)).unwrap(), e(2));
        assert_eq!(lv.successor(e(2)).unwrap(), e(1));
        assert_eq!(graph_controller(&lv, e(3)).unwrap(), e(1));
        assert_eq!(lv.iterate(e(3), 3).unwrap(), vec![e(3), e(1), e(2), e(1)]);
        assert_eq!(lv.steps_to_pattern(e(3)).unwrap(), 1);
        assert_eq!(lv.steps_to_pattern(e(1)).unwrap(), 0);

        let full = build_levels(&y, &[e(1), e(2), e(3)]).unwrap();
        assert_eq!(full.depth(), 0);
    }

    #[test]
    fn leftover_edges() {
        let g = Graph::from_triples(&[(1, 0, 1), (2, 0, 2), (3, 0, 3), (4, 8, 9)]).unwrap();
        let lv = build_levels(&g, &[e(1), e(2)]).unwrap();
        assert_eq!(lv.leftover().iter().copied().collect::<Vec<_>>(), vec![e(4)]);
        assert_eq!(lv.successor(e(4)), Err(PatternError::Leftover(e(4))));
    }

    #[test]
    fn chain_depth_two() {
        // a-b-c-d path with a two-edge block at one end.
        let g = Graph::from_triples(&[(1, 0, 1), (2, 1, 2), (3, 2, 3), (4, 3, 4)]).unwrap();
        let lv = build_levels(&g, &[e(1), e(2)]).unwrap();
        assert_eq!(lv.steps_to_pattern(e(4)).unwrap(), 2);
        assert_eq!(lv.iterate(e(4), 4).unwrap(), vec![e(4), e(3), e(2), e(1), e(2)]);
    }

    #[test]
    fn broken_block() {
        let g = Graph::from_triples(&[(1, 0, 1), (2, 1, 2), (3, 2, 3)]).unwrap();
        assert!(matches!(
            build_levels(&g, &[e(1), e(2), e(3)]),
            Err(PatternError::Broken(_, _))
        ));
        assert_eq!(build_levels(&g, &[]), Err(PatternError::EmptyBlock));
    }

    #[test]
    fn repeated_block_edges_follow_positions() {
        let y = Graph::y_graph();
        let lv = build_levels(&y, &[e(1), e(2), e(1), e(3)]).unwrap();
        assert_eq!(
            lv.iterate(e(1), 5).unwrap(),
            vec![e(1), e(2), e(1), e(3), e(1), e(2)]
        );
    }
}
