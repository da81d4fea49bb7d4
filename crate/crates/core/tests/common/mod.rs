#![allow(dead_code)]

/// Reference θ1/θ2 coefficients for Q = 1..60 (n = 4Q + 1).
pub const REFERENCE_COEFFICIENTS: [(u64, f64, f64); 60] = [
    (1, 2.7933, 6.4030),
    (2, 3.7701, 5.5135),
    (3, 4.4372, 4.8952),
    (4, 4.9688, 4.4657),
    (5, 5.4227, 4.1497),
    (6, 5.8255, 3.9063),
    (7, 6.1919, 3.7120),
    (8, 6.5307, 3.5525),
    (9, 6.8478, 3.4189),
    (10, 7.1472, 3.3049),
    (11, 7.4320, 3.2063),
    (12, 7.7043, 3.1199),
    (13, 7.9659, 3.0435),
    (14, 8.2181, 2.9753),
    (15, 8.4621, 2.9140),
    (16, 8.6987, 2.8585),
    (17, 8.9286, 2.8080),
    (18, 9.1526, 2.7618),
    (19, 9.3710, 2.7193),
    (20, 9.5845, 2.6800),
    (21, 9.7934, 2.6436),
    (22, 9.9980, 2.6098),
    (23, 10.1987, 2.5782),
    (24, 10.3957, 2.5487),
    (25, 10.5893, 2.5210),
    (26, 10.7796, 2.4949),
    (27, 10.9669, 2.4703),
    (28, 11.1513, 2.4471),
    (29, 11.3330, 2.4251),
    (30, 11.5122, 2.4043),
    (31, 11.6890, 2.3845),
    (32, 11.8634, 2.3657),
    (33, 12.0357, 2.3478),
    (34, 12.2058, 2.3307),
    (35, 12.3740, 2.3143),
    (36, 12.5402, 2.2987),
    (37, 12.7046, 2.2837),
    (38, 12.8673, 2.2693),
    (39, 13.0282, 2.2555),
    (40, 13.1876, 2.2423),
    (41, 13.3453, 2.2295),
    (42, 13.5016, 2.2173),
    (43, 13.6564, 2.2054),
    (44, 13.8099, 2.1940),
    (45, 13.9619, 2.1830),
    (46, 14.1127, 2.1724),
    (47, 14.2622, 2.1621),
    (48, 14.4104, 2.1522),
    (49, 14.5575, 2.1426),
    (50, 14.7034, 2.1333),
    (51, 14.8482, 2.1242),
    (52, 14.9919, 2.1155),
    (53, 15.1346, 2.1070),
    (54, 15.2762, 2.0987),
    (55, 15.4169, 2.0907),
    (56, 15.5565, 2.0829),
    (57, 15.6952, 2.0753),
    (58, 15.8330, 2.0680),
    (59, 15.9699, 2.0608),
    (60, 16.1059, 2.0538),
];

/// Capanni rows: (n, a, b, iqr width, reference wan_sd_s3, reference shi_sd).
pub const CAPANNI_ROWS: [(u64, f64, f64, f64, f64, f64); 4] = [
    (14, 22.8, 34.3, 4.0, 3.331, 3.348),
    (14, 0.04, 0.19, 0.04, 0.038, 0.041),
    (42, 23.0, 38.6, 8.1, 4.901, 4.631),
    (42, 0.06, 0.24, 0.09, 0.055, 0.052),
];
