//! Data-parallel map over grid points with a sequential fallback.
//!
//! With the `parallel` feature the map runs on rayon's global pool; without
//! it [`Execution::Parallel`] silently degrades to a plain loop. Both paths
//! return results in input order, and reductions use a fixed pairwise tree,
//! so output does not depend on the execution mode or thread count.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Pairwise tree reduction; `None` for an empty slice.
pub fn tree_reduce<T: Copy>(values: &[T], op: &impl Fn(T, T) -> T) -> Option<T> {
    match values.len() {
        0 => None,
        1 => Some(values[0]),
        len => {
            let (left, right) = values.split_at(len / 2);
            Some(op(tree_reduce(left, op)?, tree_reduce(right, op)?))
        }
    }
}

/// Index and value of the largest entry; ties go to the lowest index.
pub fn tree_argmax(values: &[f64]) -> Option<(usize, f64)> {
    let indexed: Vec<(usize, f64)> = values.iter().copied().enumerate().collect();
    tree_reduce(&indexed, &|a: (usize, f64), b: (usize, f64)| {
        if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    })
}

/// Index and value of the smallest entry; ties go to the lowest index.
pub fn tree_argmin(values: &[f64]) -> Option<(usize, f64)> {
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    tree_argmax(&negated).map(|(i, v)| (i, -v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
        let seq = map(Execution::Sequential, &xs, |x| x * x);
        let par = map(Execution::Parallel, &xs, |x| x * x);
        assert_eq!(seq, par);
    }

    #[test]
    fn tree_reductions() {
        assert_eq!(tree_reduce::<f64>(&[], &f64::max), None);
        let xs = [3.0, -1.0, 7.0, 7.0, 2.0];
        assert_eq!(tree_reduce(&xs, &|a: f64, b: f64| a + b), Some(18.0));
        assert_eq!(tree_argmax(&xs), Some((2, 7.0)));
        assert_eq!(tree_argmin(&xs), Some((1, -1.0)));
    }
}
