//! Per-image fan-out with a thread cap from `SHAPERET_THREADS`
//! (0 or 1 = sequential; unset = one thread per available core).

pub fn thread_cap() -> usize {
    match std::env::var("SHAPERET_THREADS") {
        Ok(v) => v.parse::<usize>().unwrap_or(1).max(1),
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    }
}

/// Applies `f` to every input, possibly across threads; output order always
/// matches input order, so results are deterministic regardless of the cap.
pub fn ordered_map<T, R, F>(inputs: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let threads = thread_cap().min(inputs.len().max(1));
    if threads <= 1 {
        return inputs.into_iter().map(f).collect();
    }

    let indexed: Vec<(usize, T)> = inputs.into_iter().enumerate().collect();
    let chunk_size = indexed.len().div_ceil(threads);
    let chunks: Vec<Vec<(usize, T)>> = {
        let mut chunks = Vec::new();
        let mut rest = indexed;
        while !rest.is_empty() {
            let tail = rest.split_off(rest.len().min(chunk_size));
            chunks.push(rest);
            rest = tail;
        }
        chunks
    };

    let mut results: Vec<(usize, R)> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|chunk| {
                let f = &f;
                scope.spawn(move || {
                    chunk
                        .into_iter()
                        .map(|(i, x)| (i, f(x)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for handle in handles {
            results.extend(handle.join().expect("worker panicked"));
        }
    });
    results.sort_by_key(|(i, _)| *i);
    results.into_iter().map(|(_, r)| r).collect()
}
