//! Constructive irreducibility on a closed box: between any two
//! configurations with the same angle multiset and at least two empty sites
//! there is a sequence of licit nearest-neighbor jumps. The construction
//! canonicalizes both endpoints (holes first, particles sorted by label) and
//! concatenates one path with the reversal of the other.
//!
//! Strategy: freeze rows from the top down, routing each wanted particle to
//! a staging cell below its target and pushing it in with a hole; then
//! freeze columns from the right; finish the remaining 2 x 3 block by exact
//! breadth-first search. Holes make every routing step feasible because the
//! unfrozen region always stays connected after removing the carried
//! particle.

use crate::error::{Error, Result};
use std::collections::{HashMap, VecDeque};

pub const HOLE: u8 = 0;

/// One licit jump: the particle at `from` moves to the empty site `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub from: usize,
    pub to: usize,
}

/// Empirical path-length constant: paths returned by `irreducibility_path`
/// on boxes up to B_2 stay below `C * p^4` with this frozen C.
pub const FROZEN_PATH_C: f64 = 40.0;

fn neighbors(c: usize, side: usize) -> impl Iterator<Item = usize> {
    let (x, y) = (c % side, c / side);
    [
        (x > 0).then(|| c - 1),
        (x + 1 < side).then(|| c + 1),
        (y > 0).then(|| c - side),
        (y + 1 < side).then(|| c + side),
    ]
    .into_iter()
    .flatten()
}

/// Replays a path from `start`, checking every jump is licit (occupied
/// source, empty target, adjacent cells). Returns the final configuration.
pub fn validate_path(start: &[u8], moves: &[Move], side: usize) -> Result<Vec<u8>> {
    let mut cfg = start.to_vec();
    for (i, mv) in moves.iter().enumerate() {
        let adjacent = neighbors(mv.from, side).any(|n| n == mv.to);
        if !adjacent || cfg[mv.from] == HOLE || cfg[mv.to] != HOLE {
            return Err(Error::InvalidParameter(format!(
                "illicit jump #{i}: {} -> {}",
                mv.from, mv.to
            )));
        }
        cfg.swap(mv.from, mv.to);
    }
    Ok(cfg)
}

/// Canonical arrangement of a multiset: holes first, then particles sorted
/// by label.
fn canonical(cfg: &[u8]) -> Vec<u8> {
    let mut c = cfg.to_vec();
    c.sort_unstable();
    c
}

struct Solver {
    side: usize,
    cfg: Vec<u8>,
    frozen: Vec<bool>,
    banned: Option<usize>,
    moves: Vec<Move>,
}

impl Solver {
    fn allowed(&self, c: usize) -> bool {
        !self.frozen[c] && self.banned != Some(c)
    }

    fn do_move(&mut self, from: usize, to: usize) {
        debug_assert!(self.cfg[from] != HOLE && self.cfg[to] == HOLE);
        self.cfg.swap(from, to);
        self.moves.push(Move { from, to });
    }

    /// Shortest path inside the allowed region from `start` to the first
    /// cell satisfying `goal`, avoiding `avoid`. Path includes both ends.
    fn bfs(
        &self,
        start: usize,
        goal: impl Fn(usize) -> bool,
        avoid: Option<usize>,
    ) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.side * self.side];
        let mut queue = VecDeque::from([start]);
        prev[start] = start;
        while let Some(c) = queue.pop_front() {
            if goal(c) && c != start {
                let mut path = vec![c];
                let mut cur = c;
                while cur != start {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for n in neighbors(c, self.side) {
                if prev[n] == usize::MAX && self.allowed(n) && avoid != Some(n) {
                    prev[n] = c;
                    queue.push_back(n);
                }
            }
        }
        None
    }

    /// Walks the nearest hole to `target` (which must not hold the carried
    /// particle), avoiding the cell `avoid`.
    fn route_hole_to(&mut self, target: usize, avoid: Option<usize>) -> Result<()> {
        if self.cfg[target] == HOLE {
            return Ok(());
        }
        let path = self
            .bfs(target, |c| self.cfg[c] == HOLE, avoid)
            .ok_or_else(|| Error::InvalidParameter("no hole reachable".into()))?;
        // path runs target -> .. -> hole; shift the contents toward the
        // hole, which walks the hole back to the target
        for w in path.windows(2).rev() {
            self.do_move(w[0], w[1]);
        }
        Ok(())
    }

    /// Carries the particle at `src` to `dst` step by step, pulling a hole
    /// in front of it before every step.
    fn move_particle(&mut self, src: usize, dst: usize) -> Result<()> {
        if src == dst {
            return Ok(());
        }
        let path = self
            .bfs(src, |c| c == dst, None)
            .ok_or_else(|| Error::InvalidParameter("target unreachable".into()))?;
        let mut p = src;
        for i in 1..path.len() {
            let c = path[i];
            self.route_hole_to(c, Some(p))?;
            self.do_move(p, c);
            p = c;
        }
        Ok(())
    }

    /// Nearest allowed cell (other than `target`) holding `label`.
    fn find_label(&self, target: usize, label: u8) -> Result<usize> {
        let path = self
            .bfs(target, |c| self.cfg[c] == label && c != target, None)
            .ok_or_else(|| Error::InvalidParameter("label not found in region".into()))?;
        Ok(*path.last().unwrap())
    }

    /// Places `want` at target `t` by staging the particle at `stage` (an
    /// unfrozen neighbor of `t`), then pushing it in with a hole.
    fn place(&mut self, t: usize, want: u8, stage: usize) -> Result<()> {
        if self.cfg[t] == want {
            self.frozen[t] = true;
            return Ok(());
        }
        if want == HOLE {
            self.route_hole_to(t, None)?;
            self.frozen[t] = true;
            return Ok(());
        }
        let src = self.find_label(t, want)?;
        if src != t {
            self.move_particle(src, stage)?;
            self.route_hole_to(t, Some(stage))?;
            self.do_move(stage, t);
        }
        self.frozen[t] = true;
        Ok(())
    }

    /// Places `want` at a target whose only unfrozen access is `access`:
    /// park a hole at `t` first, then bring the particle to `access` while
    /// `t` is banned, and push it in.
    fn place_corner(&mut self, t: usize, want: u8, access: usize) -> Result<()> {
        if self.cfg[t] == want {
            self.frozen[t] = true;
            return Ok(());
        }
        if want == HOLE {
            self.route_hole_to(t, None)?;
            self.frozen[t] = true;
            return Ok(());
        }
        self.route_hole_to(t, None)?;
        self.banned = Some(t);
        let src = if self.cfg[access] == want {
            access
        } else {
            self.find_label(access, want)?
        };
        self.move_particle(src, access)?;
        self.banned = None;
        self.do_move(access, t);
        self.frozen[t] = true;
        Ok(())
    }

    /// Exact BFS over the remaining 2 x 3 block (rows 0-1, columns 0-2).
    fn finish_block(&mut self, target: &[u8]) -> Result<()> {
        let side = self.side;
        let block: Vec<usize> = vec![0, 1, 2, side, side + 1, side + 2];
        let get = |cfg: &Vec<u8>| -> Vec<u8> { block.iter().map(|&c| cfg[c]).collect() };
        let want: Vec<u8> = block.iter().map(|&c| target[c]).collect();
        let start = get(&self.cfg);
        if start == want {
            return Ok(());
        }
        // adjacency inside the block, in block-local indices
        let adj: Vec<(usize, usize)> = vec![(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)];
        let mut parent: HashMap<Vec<u8>, (Vec<u8>, (usize, usize))> = HashMap::new();
        let mut queue = VecDeque::from([start.clone()]);
        parent.insert(start.clone(), (start.clone(), (0, 0)));
        let mut found = false;
        while let Some(state) = queue.pop_front() {
            if state == want {
                found = true;
                break;
            }
            for &(a, b) in &adj {
                let (fa, fb) = (state[a], state[b]);
                if (fa == HOLE) == (fb == HOLE) {
                    continue;
                }
                let mut next = state.clone();
                next.swap(a, b);
                if !parent.contains_key(&next) {
                    let mv = if fa == HOLE { (b, a) } else { (a, b) };
                    parent.insert(next.clone(), (state.clone(), mv));
                    queue.push_back(next);
                }
            }
        }
        if !found {
            return Err(Error::InvalidParameter(
                "final block not reachable".into(),
            ));
        }
        // unwind the BFS tree and replay the moves
        let mut chain = Vec::new();
        let mut cur = want.clone();
        while cur != start {
            let (prev, mv) = parent[&cur].clone();
            chain.push(mv);
            cur = prev;
        }
        for (a, b) in chain.into_iter().rev() {
            self.do_move(block[a], block[b]);
        }
        Ok(())
    }

    fn solve_to_canonical(mut self) -> Result<Vec<Move>> {
        let side = self.side;
        let target = canonical(&self.cfg);
        // rows from the top down, each row right to left, last cell by the
        // corner maneuver
        for r in (2..side).rev() {
            for k in (1..side).rev() {
                let t = k + side * r;
                self.place(t, target[t], t - side)?;
            }
            let t = side * r;
            self.place_corner(t, target[t], t - side)?;
        }
        // columns of the remaining two rows, right to left
        for c in (3..side).rev() {
            self.place(c + side, target[c + side], c - 1 + side)?;
            self.place_corner(c, target[c], c - 1)?;
        }
        self.finish_block(&target)?;
        debug_assert_eq!(self.cfg, target);
        Ok(self.moves)
    }
}

fn solve(cfg: &[u8], side: usize) -> Result<Vec<Move>> {
    Solver {
        side,
        cfg: cfg.to_vec(),
        frozen: vec![false; side * side],
        banned: None,
        moves: Vec::new(),
    }
    .solve_to_canonical()
}

/// A sequence of licit jumps transforming `a` into `b` on the closed box of
/// radius `p` (side 2p + 1). Requires identical label multisets and at least
/// two holes.
pub fn irreducibility_path(a: &[u8], b: &[u8], p: usize) -> Result<Vec<Move>> {
    let side = 2 * p + 1;
    if a.len() != side * side || b.len() != a.len() {
        return Err(Error::GridMismatch(format!(
            "expected {} cells for radius {p}",
            side * side
        )));
    }
    if canonical(a) != canonical(b) {
        return Err(Error::MultisetMismatch);
    }
    if a.iter().filter(|&&v| v == HOLE).count() < 2 {
        return Err(Error::NotEnoughHoles);
    }
    let mut path = solve(a, side)?;
    let back = solve(b, side)?;
    path.extend(
        back.iter()
            .rev()
            .map(|m| Move { from: m.to, to: m.from }),
    );
    Ok(path)
}

/// Exact geodesic distance between configurations by BFS over the full
/// configuration graph; only feasible on tiny boxes (used as an oracle).
pub fn bfs_distance(a: &[u8], b: &[u8], side: usize) -> Option<usize> {
    if canonical(a) != canonical(b) {
        return None;
    }
    let mut dist: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut queue = VecDeque::from([a.to_vec()]);
    dist.insert(a.to_vec(), 0);
    while let Some(state) = queue.pop_front() {
        let d = dist[&state];
        if state == b {
            return Some(d);
        }
        for c in 0..state.len() {
            if state[c] == HOLE {
                continue;
            }
            for n in neighbors(c, side) {
                if state[n] != HOLE {
                    continue;
                }
                let mut next = state.clone();
                next.swap(c, n);
                if !dist.contains_key(&next) {
                    dist.insert(next.clone(), d + 1);
                    queue.push_back(next);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use rand::seq::SliceRandom;
    use rand::Rng;

    fn random_config(cells: usize, holes: usize, labels: u8, rng: &mut impl Rng) -> Vec<u8> {
        let mut cfg: Vec<u8> = (0..cells)
            .map(|i| {
                if i < holes {
                    HOLE
                } else {
                    1 + (rng.gen::<u8>() % labels)
                }
            })
            .collect();
        cfg.shuffle(rng);
        cfg
    }

    #[test]
    fn identical_endpoints_give_an_empty_path() {
        let mut rng = substream(21, "paths");
        let a = random_config(25, 3, 4, &mut rng);
        let path = irreducibility_path(&a, &a, 2).unwrap();
        // the two canonicalization passes cancel exactly
        assert_eq!(validate_path(&a, &path, 5).unwrap(), a);
    }

    #[test]
    fn preconditions_are_enforced() {
        let a = vec![1u8; 9];
        assert!(matches!(
            irreducibility_path(&a, &a, 1),
            Err(Error::NotEnoughHoles)
        ));
        let mut b = vec![1u8; 9];
        b[0] = HOLE;
        b[1] = HOLE;
        let mut c = b.clone();
        c[2] = 2;
        assert!(matches!(
            irreducibility_path(&b, &c, 1),
            Err(Error::MultisetMismatch)
        ));
    }

    #[test]
    fn single_transposition_with_far_holes() {
        // swap two adjacent particles on B_2 with the holes far away; the
        // BFS oracle confirms reachability and bounds our length from below
        let mut a = vec![0u8; 25];
        for (i, v) in a.iter_mut().enumerate() {
            *v = match i {
                12 => 1,
                13 => 2,
                23 | 24 => HOLE,
                _ => 3,
            };
        }
        let mut b = a.clone();
        b.swap(12, 13);
        let path = irreducibility_path(&a, &b, 2).unwrap();
        assert_eq!(validate_path(&a, &path, 5).unwrap(), b);
        // oracle on the small box B_1 for the same kind of exchange
        let a1 = vec![HOLE, HOLE, 3, 3, 1, 2, 3, 3, 3];
        let mut b1 = a1.clone();
        b1.swap(4, 5);
        let p1 = irreducibility_path(&a1, &b1, 1).unwrap();
        assert_eq!(validate_path(&a1, &p1, 3).unwrap(), b1);
        let geodesic = bfs_distance(&a1, &b1, 3).unwrap();
        assert!(geodesic > 0 && p1.len() >= geodesic);
    }

    #[test]
    fn thousand_random_pairs_on_b2() {
        let mut rng = substream(22, "pairs");
        let bound = (FROZEN_PATH_C * 16.0) as usize; // C * p^4 at p = 2
        let mut worst = 0usize;
        for case in 0..1000 {
            let holes = 2 + rng.gen::<usize>() % 8;
            let a = random_config(25, holes, 5, &mut rng);
            let mut b = a.clone();
            b.shuffle(&mut rng);
            let path = irreducibility_path(&a, &b, 2).unwrap();
            assert_eq!(validate_path(&a, &path, 5).unwrap(), b, "case {case}");
            worst = worst.max(path.len());
        }
        assert!(worst <= bound, "longest path {worst} exceeds {bound}");
    }

    #[test]
    fn constructed_paths_agree_with_the_bfs_oracle_on_b1() {
        let mut rng = substream(23, "oracle");
        for _ in 0..40 {
            let holes = 2 + rng.gen::<usize>() % 4;
            let a = random_config(9, holes, 3, &mut rng);
            let mut b = a.clone();
            b.shuffle(&mut rng);
            let path = irreducibility_path(&a, &b, 1).unwrap();
            assert_eq!(validate_path(&a, &path, 3).unwrap(), b);
            let geodesic = bfs_distance(&a, &b, 3).expect("reachable");
            assert!(path.len() >= geodesic);
        }
    }
}
