use nm_tensor::Dims;

/// Generalized Hilbert order for an arbitrary cuboid: visit coordinates by
/// recursive halving along the longest axis, keeping consecutive cells
/// adjacent wherever the extents allow. On power-of-two cubes every step has
/// Manhattan length exactly 1.
///
/// Returns flat voxel indices (`d*H*W + h*W + w`) in visit order.
pub fn hilbert_order(dims: Dims) -> Vec<usize> {
    let (w, h, d) = (
        dims.width as i64,
        dims.height as i64,
        dims.depth as i64,
    );
    let mut cells = Vec::with_capacity(dims.n());
    // Major axis first: the recursion wants its first direction longest.
    if w >= h && w >= d {
        walk(&mut cells, [0, 0, 0], [w, 0, 0], [0, h, 0], [0, 0, d]);
    } else if h >= w && h >= d {
        walk(&mut cells, [0, 0, 0], [0, h, 0], [w, 0, 0], [0, 0, d]);
    } else {
        walk(&mut cells, [0, 0, 0], [0, 0, d], [w, 0, 0], [0, h, 0]);
    }
    debug_assert_eq!(cells.len(), dims.n());
    cells
        .into_iter()
        .map(|[x, y, z]| dims.flat(z as usize, y as usize, x as usize))
        .collect()
}

type V = [i64; 3];

fn sgn(v: i64) -> i64 {
    match v.cmp(&0) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    }
}

fn len(v: V) -> i64 {
    (v[0] + v[1] + v[2]).abs()
}

fn unit(v: V) -> V {
    [sgn(v[0]), sgn(v[1]), sgn(v[2])]
}

fn add(a: V, b: V) -> V {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: V, b: V) -> V {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn neg(v: V) -> V {
    [-v[0], -v[1], -v[2]]
}

fn half(v: V) -> V {
    // Floor division: axis vectors may point in the negative direction.
    [v[0].div_euclid(2), v[1].div_euclid(2), v[2].div_euclid(2)]
}

/// Emit the cells of the box spanned by axis vectors (a, b, c) starting at
/// `p`, entering along `a`.
fn walk(out: &mut Vec<V>, p: V, a: V, b: V, c: V) {
    let w = len(a);
    let h = len(b);
    let d = len(c);
    let da = unit(a);
    let db = unit(b);
    let dc = unit(c);

    // Single-file boxes: straight run.
    if h == 1 && d == 1 {
        let mut q = p;
        for _ in 0..w {
            out.push(q);
            q = add(q, da);
        }
        return;
    }
    if w == 1 && d == 1 {
        let mut q = p;
        for _ in 0..h {
            out.push(q);
            q = add(q, db);
        }
        return;
    }
    if w == 1 && h == 1 {
        let mut q = p;
        for _ in 0..d {
            out.push(q);
            q = add(q, dc);
        }
        return;
    }

    let mut a2 = half(a);
    let mut b2 = half(b);
    let mut c2 = half(c);

    // Prefer even split lengths so sub-boxes keep their parity.
    if len(a2) % 2 == 1 && w > 2 {
        a2 = add(a2, da);
    }
    if len(b2) % 2 == 1 && h > 2 {
        b2 = add(b2, db);
    }
    if len(c2) % 2 == 1 && d > 2 {
        c2 = add(c2, dc);
    }

    if 2 * w > 3 * h && 2 * w > 3 * d {
        // Wide box: split along a only.
        walk(out, p, a2, b, c);
        walk(out, add(p, a2), sub(a, a2), b, c);
    } else if 3 * h > 4 * d {
        // Flat-ish box: split along a and b.
        walk(out, p, b2, c, a2);
        walk(out, add(p, b2), a, sub(b, b2), c);
        walk(
            out,
            add(p, add(sub(a, da), sub(b2, db))),
            neg(b2),
            c,
            neg(sub(a, a2)),
        );
    } else if 3 * d > 4 * h {
        // Tall-ish box: split along a and c.
        walk(out, p, c2, a2, b);
        walk(out, add(p, c2), a, b, sub(c, c2));
        walk(
            out,
            add(p, add(sub(a, da), sub(c2, dc))),
            neg(c2),
            neg(sub(a, a2)),
            b,
        );
    } else {
        // Balanced box: full octant-style split.
        walk(out, p, b2, c2, a2);
        walk(out, add(p, b2), c, a2, sub(b, b2));
        walk(
            out,
            add(p, add(sub(b2, db), sub(c, dc))),
            a,
            neg(b2),
            neg(sub(c, c2)),
        );
        walk(
            out,
            add(p, add(add(sub(a, da), b2), sub(c, dc))),
            neg(c),
            neg(sub(a, a2)),
            sub(b, b2),
        );
        walk(
            out,
            add(p, add(sub(a, da), sub(b2, db))),
            neg(b2),
            c2,
            neg(sub(a, a2)),
        );
    }
}
