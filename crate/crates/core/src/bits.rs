//! Label subsets as bitmasks over label indices.

pub(crate) type Mask = u128;

pub(crate) fn single(i: usize) -> Mask {
    1 << i
}

pub(crate) fn full(n: usize) -> Mask {
    if n == Mask::BITS as usize {
        Mask::MAX
    } else {
        (1 << n) - 1
    }
}

pub(crate) fn contains(m: Mask, i: usize) -> bool {
    m >> i & 1 == 1
}

pub(crate) fn iter(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}
