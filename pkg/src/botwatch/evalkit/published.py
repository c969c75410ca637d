"""Published reference values the replica tables are checked against."""

from __future__ import annotations

GENUINE = "genuine_accounts"

# name -> (accounts, tweets, mean creation year)
DATASET_STATS = {
    "genuine_accounts": (3474, 8_377_522, 2011),
    "social_spambots_1": (991, 1_610_176, 2012),
    "social_spambots_2": (3457, 428_542, 2014),
    "social_spambots_3": (464, 1_418_626, 2011),
    "traditional_spambots_1": (1000, 145_094, 2009),
    "traditional_spambots_2": (100, 74_957, 2014),
    "traditional_spambots_3": (433, 5_794_931, 2013),
    "traditional_spambots_4": (1128, 133_311, 2009),
    "fake_followers": (3351, 196_027, 2012),
}

# test set -> (spambot dataset, accounts)
TEST_SETS = {
    "test_set_1": ("social_spambots_1", 1982),
    "test_set_2": ("social_spambots_3", 928),
}

# survivability: name -> (total, alive, deleted, suspended) and printed cells
SURVIVAL_COUNTS = {
    "genuine_accounts": (3474, 3353, 115, 6),
    "social_spambots_1": (994, 946, 2, 46),
    "social_spambots_2": (3457, 3322, 1, 134),
    "social_spambots_3": (467, 465, 2, 0),
    "traditional_spambots_1": (1000, 889, 25, 86),
    "traditional_spambots_2": (100, 1, 0, 99),
    "fake_followers": (3351, 851, 38, 2462),
}
SURVIVAL_CELLS = {
    "genuine_accounts": ("3,353 (96.5%)", "115 (3.3%)", "6 (0.1%)"),
    "social_spambots_1": ("946 (95.2%)", "2 (0.2%)", "46 (4.6%)"),
    "social_spambots_2": ("3,322 (96.1%)", "1 (0.1%)", "134 (3.8%)"),
    "social_spambots_3": ("465 (99.6%)", "2 (0.4%)", "0 (0.0%)"),
    "traditional_spambots_1": ("889 (88.9%)", "25 (2.5%)", "86 (8.6%)"),
    "traditional_spambots_2": ("1 (1.0%)", "0 (0.0%)", "99 (99.0%)"),
    "fake_followers": ("851 (25.4%)", "38 (1.1%)", "2,462 (73.5%)"),
}

# effect (percentage points) and stars per (alive, deleted, suspended)
SIGNIFICANCE = {
    "social_spambots_1": ((-1.3, "*"), (-3.1, "***"), (4.5, "***")),
    "social_spambots_2": ((-0.4, ""), (-3.2, "***"), (3.7, "***")),
    "social_spambots_3": ((3.1, "***"), (-2.9, "***"), (-0.1, "")),
    "traditional_spambots_1": ((-7.6, "***"), (-0.8, ""), (8.7, "***")),
    "traditional_spambots_2": ((-95.5, "***"), (-3.3, ""), (98.9, "***")),
    "fake_followers": ((-71.1, "***"), (-2.2, "***"), (73.4, "***")),
}

# crowdsourcing: group -> (accounts, tp, tn, fp, fn, accuracy, kappa)
CROWD_RESULTS = {
    "traditional_spambots": (1516, 1385, 0, 0, 131, 0.9136, 0.007),
    "social_spambots": (1393, 328, 0, 0, 1065, 0.2355, 0.186),
    "genuine_accounts": (1377, 0, 1267, 110, 0, 0.9201, 0.410),
}
CROWD_ACCOUNTS_REQUESTED = 4428
CROWD_TEST_QUESTIONS = 25
CROWD_CONTRIBUTORS = 247

# technique comparison: (test set, technique, type, P, R, Spec, Acc, F, MCC)
DETECTOR_RESULTS = (
    ("test_set_1", "Twitter countermeasures", "mixed", 1.000, 0.094, 1.000, 0.691, 0.171, 0.252),
    ("test_set_1", "Human annotators", "manual", 0.267, 0.080, 0.921, 0.698, 0.123, 0.001),
    ("test_set_1", "BotOrNot?", "supervised", 0.471, 0.208, 0.918, 0.734, 0.288, 0.174),
    ("test_set_1", "C. Yang et al.", "supervised", 0.563, 0.170, 0.860, 0.506, 0.261, 0.043),
    ("test_set_1", "Miller et al.", "unsupervised", 0.555, 0.358, 0.698, 0.526, 0.435, 0.059),
    ("test_set_1", "Ahmed et al. (modified)", "unsupervised", 0.945, 0.944, 0.945, 0.943, 0.944, 0.886),
    ("test_set_1", "Digital DNA", "unsupervised", 0.982, 0.972, 0.981, 0.976, 0.977, 0.952),
    ("test_set_2", "Twitter countermeasures", "mixed", 1.000, 0.004, 1.000, 0.502, 0.008, 0.046),
    ("test_set_2", "Human annotators", "manual", 0.647, 0.509, 0.921, 0.829, 0.570, 0.470),
    ("test_set_2", "BotOrNot?", "supervised", 0.635, 0.950, 0.981, 0.922, 0.761, 0.738),
    ("test_set_2", "C. Yang et al.", "supervised", 0.727, 0.409, 0.848, 0.629, 0.524, 0.287),
    ("test_set_2", "Miller et al.", "unsupervised", 0.467, 0.306, 0.654, 0.481, 0.370, -0.043),
    ("test_set_2", "Ahmed et al. (modified)", "unsupervised", 0.913, 0.935, 0.912, 0.923, 0.923, 0.847),
    ("test_set_2", "Digital DNA", "unsupervised", 1.000, 0.858, 1.000, 0.929, 0.923, 0.867),
)
