//! Built-in desk corpus: ten deterministic 256x144 scenes with
//! photograph-like statistics (smooth gradients, fractal texture, soft and
//! hard edges, moderate color saturation, mild sensor noise).

use crate::cipher::mix;
use crate::image::RasterImage;

pub const DESK_WIDTH: usize = 256;
pub const DESK_HEIGHT: usize = 144;

/// Names of the built-in scenes, in corpus order.
pub const DESK_SCENES: [&str; 10] = [
    "sky", "hills", "sunset", "stone", "foliage", "portrait", "wood", "bokeh", "city", "fruit",
];

/// All ten scenes, in [`DESK_SCENES`] order.
pub fn desk_corpus() -> Vec<(String, RasterImage)> {
    DESK_SCENES
        .iter()
        .map(|&name| (name.to_string(), desk_image(name).expect("known scene")))
        .collect()
}

/// One scene by name.
pub fn desk_image(name: &str) -> Option<RasterImage> {
    let seed = DESK_SCENES.iter().position(|&n| n == name)? as u64 + 1;
    let f: fn(f64, f64, u64) -> [f64; 3] = match name {
        "sky" => sky,
        "hills" => hills,
        "sunset" => sunset,
        "stone" => stone,
        "foliage" => foliage,
        "portrait" => portrait,
        "wood" => wood,
        "bokeh" => bokeh,
        "city" => city,
        "fruit" => fruit,
        _ => return None,
    };
    let img = RasterImage::from_fn(DESK_WIDTH, DESK_HEIGHT, |x, y| {
        // box-filtered 3x3 supersampling, a stand-in for lens blur
        let mut rgb = [0.0; 3];
        for sy in [-1.0 / 3.0, 0.0, 1.0 / 3.0] {
            for sx in [-1.0 / 3.0, 0.0, 1.0 / 3.0] {
                let v = f(x as f64 + sx, y as f64 + sy, seed);
                for c in 0..3 {
                    rgb[c] += v[c] / 9.0;
                }
            }
        }
        let mut out = [0u8; 3];
        for c in 0..3 {
            let grain = (hash01(seed ^ 0xA5A5, x as i64 * 3 + c as i64, y as i64) - 0.5) * 5.0;
            out[c] = (rgb[c] + grain).round().clamp(0.0, 255.0) as u8;
        }
        out
    })
    .expect("fixed dimensions");
    Some(img)
}

fn hash01(seed: u64, ix: i64, iy: i64) -> f64 {
    let h = mix(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (ix as u64).wrapping_mul(0xD1B5_4A32_D192_ED03)
        ^ (iy as u64).wrapping_mul(0x8CB9_2BA7_2F3D_8DD7));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

fn value_noise(seed: u64, x: f64, y: f64) -> f64 {
    let (x0, y0) = (x.floor(), y.floor());
    let (tx, ty) = (smooth(x - x0), smooth(y - y0));
    let (ix, iy) = (x0 as i64, y0 as i64);
    let a = hash01(seed, ix, iy);
    let b = hash01(seed, ix + 1, iy);
    let c = hash01(seed, ix, iy + 1);
    let d = hash01(seed, ix + 1, iy + 1);
    let top = a + (b - a) * tx;
    let bottom = c + (d - c) * tx;
    top + (bottom - top) * ty
}

/// Fractal noise in [0, 1).
fn fbm(seed: u64, x: f64, y: f64, scale: f64, octaves: u32) -> f64 {
    let (mut sum, mut amp, mut norm, mut freq) = (0.0, 1.0, 0.0, 1.0 / scale);
    for o in 0..octaves {
        sum += amp * value_noise(seed.wrapping_add(o as u64 * 7919), x * freq, y * freq);
        norm += amp;
        amp *= 0.5;
        freq *= 2.0;
    }
    sum / norm
}

fn lerp3(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    let t = t.clamp(0.0, 1.0);
    [
        a[0] + (b[0] - a[0]) * t,
        a[1] + (b[1] - a[1]) * t,
        a[2] + (b[2] - a[2]) * t,
    ]
}

fn scale3(a: [f64; 3], k: f64) -> [f64; 3] {
    [a[0] * k, a[1] * k, a[2] * k]
}

fn sky(x: f64, y: f64, s: u64) -> [f64; 3] {
    let base = lerp3([70.0, 120.0, 200.0], [175.0, 205.0, 235.0], y / 144.0);
    let cloud = ((fbm(s, x, y * 1.6, 48.0, 5) - 0.45) * 3.0).clamp(0.0, 1.0);
    lerp3(base, [245.0, 245.0, 250.0], cloud)
}

fn hills(x: f64, y: f64, s: u64) -> [f64; 3] {
    let ridge = 70.0 + 20.0 * (x / 40.0).sin() + 18.0 * fbm(s, x, 0.0, 30.0, 3);
    if y < ridge {
        lerp3([120.0, 165.0, 215.0], [200.0, 215.0, 230.0], y / ridge)
    } else {
        let tex = fbm(s + 1, x, y, 6.0, 4);
        let depth = (y - ridge) / (144.0 - ridge);
        let grass = lerp3([90.0, 140.0, 60.0], [50.0, 95.0, 35.0], depth);
        scale3(grass, 0.75 + 0.5 * tex)
    }
}

fn sunset(x: f64, y: f64, s: u64) -> [f64; 3] {
    let mut c = lerp3([250.0, 170.0, 80.0], [110.0, 60.0, 120.0], 1.0 - y / 110.0);
    let d = ((x - 180.0).powi(2) + (y - 88.0).powi(2)).sqrt();
    if d < 18.0 {
        c = lerp3([255.0, 235.0, 170.0], c, (d / 18.0).powi(4));
    }
    let ground = 100.0 + 10.0 * fbm(s, x, 0.0, 25.0, 3);
    if y > ground {
        c = scale3([40.0, 28.0, 38.0], 0.8 + 0.4 * fbm(s + 2, x, y, 5.0, 3));
    }
    c
}

fn stone(x: f64, y: f64, s: u64) -> [f64; 3] {
    let n = fbm(s, x, y, 20.0, 6);
    let fine = fbm(s + 3, x, y, 2.5, 2);
    let v = 70.0 + 120.0 * n + 30.0 * (fine - 0.5);
    [v * 1.05, v * 0.95, v * 0.82]
}

fn foliage(x: f64, y: f64, s: u64) -> [f64; 3] {
    let n = fbm(s, x, y, 9.0, 5);
    let leaf = fbm(s + 5, x * 1.3, y, 4.0, 3);
    let shade = lerp3([25.0, 60.0, 20.0], [120.0, 180.0, 60.0], n);
    if leaf > 0.68 {
        lerp3(shade, [210.0, 200.0, 90.0], (leaf - 0.68) * 4.0)
    } else {
        shade
    }
}

fn portrait(x: f64, y: f64, s: u64) -> [f64; 3] {
    let bg = lerp3([40.0, 50.0, 70.0], [80.0, 90.0, 110.0], x / 256.0);
    let (dx, dy) = ((x - 128.0) / 48.0, (y - 80.0) / 60.0);
    let r = (dx * dx + dy * dy).sqrt();
    if r < 1.0 {
        let light = 1.0 - 0.35 * ((x - 110.0) / 60.0).powi(2).min(1.0);
        let skin = scale3([225.0, 175.0, 145.0], 0.7 + 0.3 * light);
        let hair_line = 40.0 + 6.0 * fbm(s, x, 0.0, 8.0, 2);
        if y < hair_line {
            scale3(
                [70.0, 45.0, 30.0],
                0.7 + 0.6 * fbm(s + 1, x, y * 3.0, 3.0, 3),
            )
        } else {
            lerp3(skin, bg, smooth(((r - 0.92) / 0.08).clamp(0.0, 1.0)))
        }
    } else {
        bg
    }
}

fn wood(x: f64, y: f64, s: u64) -> [f64; 3] {
    let warp = 14.0 * fbm(s, x, y, 40.0, 3);
    let d = ((x - 40.0).powi(2) * 0.08 + (y + 200.0).powi(2)).sqrt() + warp;
    let ring = 0.5 + 0.5 * (d / 3.2).sin();
    let grain = fbm(s + 9, x * 0.3, y * 4.0, 6.0, 3);
    lerp3(
        [150.0, 95.0, 50.0],
        [205.0, 150.0, 95.0],
        0.6 * ring + 0.4 * grain,
    )
}

fn bokeh(x: f64, y: f64, s: u64) -> [f64; 3] {
    let mut c = lerp3(
        [20.0, 15.0, 35.0],
        [45.0, 30.0, 60.0],
        fbm(s, x, y, 60.0, 2),
    );
    for i in 0..14 {
        let cx = hash01(s, i, 0) * 256.0;
        let cy = hash01(s, i, 1) * 144.0;
        let rad = 10.0 + 18.0 * hash01(s, i, 2);
        let hue = hash01(s, i, 3);
        let tint = if hue < 0.33 {
            [255.0, 190.0, 90.0]
        } else if hue < 0.66 {
            [120.0, 200.0, 255.0]
        } else {
            [255.0, 120.0, 170.0]
        };
        let d = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
        let a = 0.55 * (1.0 - smooth(((d - rad + 3.0) / 3.0).clamp(0.0, 1.0)));
        c = lerp3(c, tint, a);
    }
    c
}

fn city(x: f64, y: f64, s: u64) -> [f64; 3] {
    let sky = lerp3([150.0, 170.0, 200.0], [215.0, 200.0, 190.0], y / 144.0);
    // non-integer pitches keep facade edges off any fixed pixel lattice
    const PITCH: f64 = 27.3;
    const WINDOW: f64 = 5.7;
    let col = (x / PITCH).floor() as i64;
    let top = 20.0 + 70.0 * hash01(s, col, 5);
    if y < top {
        return sky;
    }
    let tone = 60.0 + 80.0 * hash01(s, col, 6);
    let body = [tone, tone * 0.98, tone * 1.08];
    let (wx, wy) = (x.rem_euclid(PITCH), (y - top).rem_euclid(9.6));
    if wx > 3.9 && wx < 23.5 && wx.rem_euclid(WINDOW) < 3.8 && wy > 3.0 && wy < 7.6 {
        let lit = hash01(s, (x / WINDOW) as i64, (y / 9.6) as i64) > 0.6;
        if lit {
            [240.0, 215.0, 140.0]
        } else {
            scale3(body, 0.6)
        }
    } else {
        scale3(body, 0.9 + 0.2 * fbm(s + 4, x, y, 3.0, 2))
    }
}

fn fruit(x: f64, y: f64, s: u64) -> [f64; 3] {
    let mut c = if y > 100.0 {
        scale3([170.0, 120.0, 80.0], 0.85 + 0.3 * fbm(s, x, y, 5.0, 3))
    } else {
        lerp3([225.0, 220.0, 205.0], [190.0, 185.0, 170.0], y / 100.0)
    };
    let fruits = [
        (70.0, 90.0, 34.0, [200.0, 40.0, 35.0]),
        (135.0, 95.0, 30.0, [235.0, 140.0, 30.0]),
        (195.0, 88.0, 36.0, [120.0, 170.0, 50.0]),
    ];
    for (cx, cy, r, tint) in fruits {
        let d = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
        if d < r {
            let hl = ((x - cx + r * 0.35).powi(2) + (y - cy + r * 0.35).powi(2)).sqrt() / r;
            let shade = 0.55 + 0.45 * (1.0 - d / r).sqrt();
            let mut f = scale3(tint, shade);
            f = lerp3([255.0, 250.0, 240.0], f, (hl * 3.0).min(1.0));
            c = lerp3(f, c, ((d - r + 1.5) / 1.5).clamp(0.0, 1.0));
        }
    }
    c
}
