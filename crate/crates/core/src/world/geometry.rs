//! Angular helpers shared by the entity map, the glove and firing.

use crate::gaze::ViewRay;

/// Wraps an angle in degrees into `(-180, 180]`.
pub fn wrap_degrees(a: f64) -> f64 {
    let mut w = a.rem_euclid(360.0);
    if w > 180.0 {
        w -= 360.0;
    }
    w
}

fn unit_vector(azimuth: f64, elevation: f64) -> [f64; 3] {
    let (az, el) = (azimuth.to_radians(), elevation.to_radians());
    [el.cos() * az.cos(), el.cos() * az.sin(), el.sin()]
}

/// Great-circle angle in degrees between two view directions.
pub fn angular_distance(a: ViewRay, b: ViewRay) -> f64 {
    let p = unit_vector(a.azimuth, a.elevation);
    let q = unit_vector(b.azimuth, b.elevation);
    let dot = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
    let cross = [
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    ];
    let cross_norm = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    cross_norm.atan2(dot).to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ray(azimuth: f64, elevation: f64) -> ViewRay {
        ViewRay { azimuth, elevation }
    }

    #[test]
    fn wrap() {
        assert_eq!(wrap_degrees(190.0), -170.0);
        assert_eq!(wrap_degrees(-180.0), 180.0);
        assert_eq!(wrap_degrees(45.0), 45.0);
    }

    #[test]
    fn distance_on_the_horizon_is_azimuth_difference() {
        assert!((angular_distance(ray(10.0, 0.0), ray(-5.0, 0.0)) - 15.0).abs() < 1e-12);
        assert_eq!(angular_distance(ray(3.0, 2.0), ray(3.0, 2.0)), 0.0);
    }

    #[test]
    fn distance_matches_spherical_law_of_cosines() {
        let (a, b) = (ray(20.0, 10.0), ray(-15.0, -25.0));
        let (la, pa) = (a.azimuth.to_radians(), a.elevation.to_radians());
        let (lb, pb) = (b.azimuth.to_radians(), b.elevation.to_radians());
        let want = (pa.sin() * pb.sin() + pa.cos() * pb.cos() * (la - lb).cos())
            .acos()
            .to_degrees();
        assert!((angular_distance(a, b) - want).abs() < 1e-9);
    }
}
