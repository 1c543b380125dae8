"""
Application-wide constants.

Method names, exit codes, seed streams and the reference dataset catalogue
live here.
"""

# Combination methods compared by the benchmark
METHOD_AVG = "avg"
METHOD_SW_3NN = "sw_3nn"
METHOD_SW_KA = "sw_ka"
METHOD_SW_OOB = "sw_oob"
METHOD_DCS_RFD = "dcs_rfd"

ALL_METHODS = [METHOD_AVG, METHOD_SW_3NN, METHOD_SW_KA, METHOD_SW_OOB, METHOD_DCS_RFD]
STATIC_METHODS = [METHOD_AVG, METHOD_SW_3NN, METHOD_SW_KA, METHOD_SW_OOB]
BASELINE_METHOD = METHOD_AVG

# Dissimilarity measure tags
MEASURE_PLAIN = "plain"
MEASURE_PATH_LENGTH = "path_length"
MEASURE_RFD = "rfd"

# CLI exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3

# On-disk format of saved forests and models
MODEL_FORMAT_VERSION = 1

# Seed streams: every derived RNG seed is (master seed, stream, index...)
STREAM_VIEW = 1
STREAM_FINAL = 2
STREAM_RUN = 3
STREAM_SPLIT = 4

# JSON report schema
REPORT_SCHEMA_VERSION = 1
CSV_FLOAT_FORMAT = "%.4f"

# Real-world multi-view datasets the protocol was designed around.
# They are not bundled; a manifest with one of these names is checked
# against the declared counts.
REFERENCE_DATASETS = {
    "AWA8": {"features": 10940, "instances": 640, "views": 6, "classes": 8, "ir": 1.0},
    "AWA15": {"features": 10940, "instances": 1200, "views": 6, "classes": 15, "ir": 1.0},
    "BBC": {"features": 13628, "instances": 2012, "views": 2, "classes": 5, "ir": 1.34},
    "BBCSport": {"features": 6386, "instances": 544, "views": 2, "classes": 5, "ir": 3.16},
    "Cal7": {"features": 3766, "instances": 1474, "views": 6, "classes": 7, "ir": 25.74},
    "Cal20": {"features": 3766, "instances": 2386, "views": 6, "classes": 20, "ir": 24.18},
    "IDHcodel": {"features": 6746, "instances": 67, "views": 5, "classes": 2, "ir": 2.94},
    "LowGrade": {"features": 6746, "instances": 75, "views": 5, "classes": 2, "ir": 1.4},
    "LSVT": {"features": 309, "instances": 126, "views": 4, "classes": 2, "ir": 2.0},
    "Metabolomic": {"features": 476, "instances": 94, "views": 3, "classes": 2, "ir": 1.0},
    "Mfeat": {"features": 649, "instances": 600, "views": 6, "classes": 10, "ir": 1.0},
    "NonIDH1": {"features": 6746, "instances": 84, "views": 5, "classes": 2, "ir": 3.0},
    "NUS-WIDE2": {"features": 639, "instances": 442, "views": 5, "classes": 2, "ir": 1.12},
    "NUS-WIDE3": {"features": 639, "instances": 546, "views": 5, "classes": 3, "ir": 1.43},
    "Progression": {"features": 6746, "instances": 84, "views": 5, "classes": 2, "ir": 1.68},
}

# Published Avg accuracy used by the conditional LSVT check
LSVT_AVG_ACCURACY = 84.29
