use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("distance matrix is empty")]
    Empty,
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("negative distance {value} at ({from}, {to})")]
    Negative { from: usize, to: usize, value: i64 },
    #[error("non-zero diagonal entry {value} at station {station}")]
    NonZeroDiagonal { station: usize, value: i64 },
}

/// All-pairs shortest paths (Floyd-Warshall) over a square matrix of
/// non-negative travel times.
///
/// Input is taken as signed so that negative entries can be reported rather
/// than silently wrapped.
pub fn shortest_path_closure(distance: &[Vec<i64>]) -> Result<Vec<Vec<u32>>, MatrixError> {
    let n = distance.len();
    if n == 0 {
        return Err(MatrixError::Empty);
    }
    for (i, row) in distance.iter().enumerate() {
        if row.len() != n {
            return Err(MatrixError::NotSquare {
                row: i,
                len: row.len(),
                expected: n,
            });
        }
        for (j, &value) in row.iter().enumerate() {
            if value < 0 {
                return Err(MatrixError::Negative {
                    from: i,
                    to: j,
                    value,
                });
            }
        }
        if row[i] != 0 {
            return Err(MatrixError::NonZeroDiagonal {
                station: i,
                value: row[i],
            });
        }
    }

    let mut d: Vec<Vec<i64>> = distance.to_vec();
    for u in 0..n {
        for i in 0..n {
            let diu = d[i][u];
            for j in 0..n {
                let via = diu + d[u][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    Ok(d.into_iter()
        .map(|row| row.into_iter().map(|v| v as u32).collect())
        .collect())
}

/// Fully connected station graph with integer travel times in time slices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StationGraph {
    distance: Vec<Vec<u32>>,
}

impl StationGraph {
    /// Wraps an already-closed matrix. Use [`StationGraph::closed`] to apply
    /// shortest-path closure first.
    pub fn new(distance: Vec<Vec<u32>>) -> Result<Self, MatrixError> {
        let n = distance.len();
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        for (i, row) in distance.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::NotSquare {
                    row: i,
                    len: row.len(),
                    expected: n,
                });
            }
            if row[i] != 0 {
                return Err(MatrixError::NonZeroDiagonal {
                    station: i,
                    value: row[i] as i64,
                });
            }
        }
        Ok(Self { distance })
    }

    pub fn closed(distance: &[Vec<i64>]) -> Result<Self, MatrixError> {
        Ok(Self {
            distance: shortest_path_closure(distance)?,
        })
    }

    #[inline]
    pub fn station_count(&self) -> usize {
        self.distance.len()
    }

    #[inline]
    pub fn distance(&self, from: usize, to: usize) -> u32 {
        self.distance[from][to]
    }

    pub fn matrix(&self) -> &[Vec<u32>] {
        &self.distance
    }

    /// Mean over all I*I entries, diagonal included.
    pub fn mean_distance(&self) -> f64 {
        let n = self.station_count();
        let total: u64 = self.distance.iter().flatten().map(|&d| d as u64).sum();
        total as f64 / (n * n) as f64
    }

    pub fn satisfies_triangle_inequality(&self) -> bool {
        let n = self.station_count();
        (0..n).all(|i| {
            (0..n).all(|u| {
                (0..n).all(|j| self.distance[i][j] <= self.distance[i][u] + self.distance[u][j])
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Shortest path by enumerating every simple path of up to `n` stations.
    fn brute_force(d: &[Vec<i64>]) -> Vec<Vec<u32>> {
        fn walk(
            d: &[Vec<i64>],
            at: usize,
            to: usize,
            seen: &mut Vec<bool>,
            acc: i64,
            best: &mut i64,
        ) {
            if at == to {
                *best = (*best).min(acc);
                return;
            }
            for next in 0..d.len() {
                if !seen[next] {
                    seen[next] = true;
                    walk(d, next, to, seen, acc + d[at][next], best);
                    seen[next] = false;
                }
            }
        }
        let n = d.len();
        let mut out = vec![vec![0u32; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut seen = vec![false; n];
                seen[i] = true;
                let mut best = i64::MAX;
                walk(d, i, j, &mut seen, 0, &mut best);
                out[i][j] = best as u32;
            }
        }
        out
    }

    #[test]
    fn metric_input_is_unchanged() {
        assert_eq!(
            shortest_path_closure(&[vec![0, 3], vec![3, 0]]).unwrap(),
            vec![vec![0, 3], vec![3, 0]]
        );
    }

    #[test]
    fn shortcut_through_middle_station() {
        let input = vec![vec![0, 5, 10], vec![5, 0, 1], vec![10, 1, 0]];
        let expected = brute_force(&input);
        assert_eq!(expected, vec![vec![0, 5, 6], vec![5, 0, 1], vec![6, 1, 0]]);
        assert_eq!(shortest_path_closure(&input).unwrap(), expected);
    }

    #[test]
    fn zero_matrix() {
        let z = vec![vec![0i64; 4]; 4];
        assert_eq!(shortest_path_closure(&z).unwrap(), vec![vec![0u32; 4]; 4]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            shortest_path_closure(&[vec![0, -1], vec![1, 0]]),
            Err(MatrixError::Negative { .. })
        ));
        assert!(matches!(
            shortest_path_closure(&[vec![0, 1], vec![1]]),
            Err(MatrixError::NotSquare { .. })
        ));
        assert!(matches!(
            shortest_path_closure(&[]),
            Err(MatrixError::Empty)
        ));
    }

    #[test]
    fn mean_includes_diagonal() {
        let g = StationGraph::new(vec![vec![0, 5], vec![5, 0]]).unwrap();
        assert_eq!(g.mean_distance(), 2.5);
    }

    proptest::proptest! {
        #[test]
        fn closure_matches_brute_force_and_is_idempotent(
            n in 1usize..6,
            raw in proptest::collection::vec(0i64..12, 36),
        ) {
            let mut m = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        m[i][j] = raw[i * 6 + j];
                    }
                }
            }
            let closed = shortest_path_closure(&m).unwrap();
            proptest::prop_assert_eq!(&closed, &brute_force(&m));
            for i in 0..n {
                for j in 0..n {
                    proptest::prop_assert!(closed[i][j] as i64 <= m[i][j]);
                }
            }
            let again: Vec<Vec<i64>> = closed.iter().map(|r| r.iter().map(|&v| v as i64).collect()).collect();
            proptest::prop_assert_eq!(&shortest_path_closure(&again).unwrap(), &closed);
            proptest::prop_assert!(StationGraph::new(closed).unwrap().satisfies_triangle_inequality());
        }
    }
}
