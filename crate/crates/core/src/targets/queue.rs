use super::records::RatingRecord;
use std::collections::BTreeMap;

struct Item<'a> {
    id: &'a str,
    class: u8,
    rounds: usize,
}

/// Largest-remainder apportionment of `size` seats over `counts`; ties in
/// the remainder go to the lower index.
pub(crate) fn apportion(counts: &[usize], size: usize) -> Vec<usize> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return vec![0; counts.len()];
    }
    let size = size.min(total);
    let mut seats: Vec<usize> = counts.iter().map(|&c| c * size / total).collect();
    let mut rest: Vec<(usize, usize)> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (c * size % total, i))
        .collect();
    rest.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let missing = size - seats.iter().sum::<usize>();
    for &(_, i) in rest.iter().take(missing) {
        seats[i] += 1;
    }
    seats
}

/// Compositions that still need re-rating, fewest recorded rounds first.
///
/// The subset is drawn per initial class in proportion to how many
/// compositions hold that class. Inside a class, compositions already being
/// re-rated are kept first so the subset stays stable as ratings arrive;
/// the rest follow in id order. A composition leaves the queue once it has
/// `rounds_target` rounds, counting the initial one.
pub fn rerate_queue(
    records: &[RatingRecord],
    subset_size: usize,
    rounds_target: usize,
    rater: Option<&str>,
) -> Vec<String> {
    let mut initial: BTreeMap<&str, u8> = BTreeMap::new();
    let mut rounds: BTreeMap<&str, std::collections::BTreeSet<u32>> = BTreeMap::new();
    for r in records.iter().filter(|r| rater.is_none_or(|id| r.rater_id == id)) {
        if r.round == 0 {
            initial.entry(&r.composition_id).or_insert(r.rating);
        }
        rounds.entry(&r.composition_id).or_default().insert(r.round);
    }
    let mut by_class: Vec<Vec<Item>> = (0..5).map(|_| Vec::new()).collect();
    for (&id, &class) in &initial {
        by_class[class as usize - 1].push(Item { id, class, rounds: rounds[id].len() });
    }
    let counts: Vec<usize> = by_class.iter().map(Vec::len).collect();
    let quotas = apportion(&counts, subset_size);
    let mut subset: Vec<Item> = Vec::new();
    for (mut items, q) in by_class.into_iter().zip(quotas) {
        // ids are unique in the map, so the sort is total
        items.sort_by(|a, b| (b.rounds > 1).cmp(&(a.rounds > 1)).then(a.id.cmp(b.id)));
        subset.extend(items.into_iter().take(q));
    }
    subset.retain(|it| it.rounds < rounds_target);
    subset.sort_by(|a, b| a.rounds.cmp(&b.rounds).then(a.class.cmp(&b.class)).then(a.id.cmp(b.id)));
    subset.into_iter().map(|it| it.id.to_string()).collect()
}
