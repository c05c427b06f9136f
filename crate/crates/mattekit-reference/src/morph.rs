//! Brute-force morphology and mask comparisons.

/// Trimap labels by definition: a pixel is foreground if every in-image
/// pixel within Chebyshev distance `radius` has alpha at or above the
/// foreground threshold (background symmetrically); everything else is
/// unknown. Returns {0, 128, 255} labels.
pub fn generate_trimap(
    alpha: &[f64],
    width: usize,
    height: usize,
    fg_threshold: f64,
    bg_threshold: f64,
    radius: usize,
) -> Vec<u8> {
    let all_in_window = |cx: usize, cy: usize, pred: &dyn Fn(f64) -> bool| -> bool {
        let r = radius as isize;
        for dy in -r..=r {
            for dx in -r..=r {
                let x = cx as isize + dx;
                let y = cy as isize + dy;
                if x < 0 || y < 0 || x >= width as isize || y >= height as isize {
                    continue; // outside counts as matching
                }
                if !pred(alpha[y as usize * width + x as usize]) {
                    return false;
                }
            }
        }
        true
    };
    let mut out = vec![128u8; width * height];
    for y in 0..height {
        for x in 0..width {
            if all_in_window(x, y, &|v| v >= fg_threshold) {
                out[y * width + x] = 255;
            } else if all_in_window(x, y, &|v| v <= bg_threshold) {
                out[y * width + x] = 0;
            }
        }
    }
    out
}

/// Fraction of pixels where the strictly-binarized matte disagrees with the
/// binary segmentation mask.
pub fn alignment_distance(alpha: &[f64], seg: &[f64], epsilon: f64) -> f64 {
    let disagreements = alpha
        .iter()
        .zip(seg)
        .filter(|(&a, &s)| ((a > epsilon) as u8 as f64) != s)
        .count();
    disagreements as f64 / alpha.len() as f64
}
