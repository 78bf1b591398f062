// reference_table.hpp — published ANBC reference data, embedded
//
// Eight sub-tables (a-h), 10 loads each: N in {4,5,6,7}, lambda from 0.001
// to 0.010, mu1 = 0.1, p = 0.8. mu2 is 0.01 for a/c/e/g and 1/150 for
// b/d/f/h; the sources print the latter variously as 0.006667, 0.006666 and
// 0.0066666667, all normalized here to 1/150.

#pragma once

#include <array>

namespace busq {

struct ReferenceRow {
  const char* table_id; // "1.a" .. "1.h"
  int n_processors;
  double mu2;
  double lambda;
  double anbc_fcfs;
  double anbc_priority;
  double pct_difference;
};

inline constexpr double kRefMu1 = 0.1;
inline constexpr double kRefP = 0.8;
inline constexpr double kMu2Slow = 1.0 / 150.0;

inline constexpr std::array<ReferenceRow, 80> kReferenceTable = {{
    {"1.a", 4, 0.01, 0.001, 0.07014828, 0.07344077, 4.69361131},
    {"1.a", 4, 0.01, 0.002, 0.18977920, 0.20284240, 6.88336661},
    {"1.a", 4, 0.01, 0.003, 0.34289203, 0.36860743, 7.49956231},
    {"1.a", 4, 0.01, 0.004, 0.51524391, 0.55285868, 7.30038140},
    {"1.a", 4, 0.01, 0.005, 0.69555280, 0.74238917, 6.73368933},
    {"1.a", 4, 0.01, 0.006, 0.87572487, 0.92861078, 6.03910016},
    {"1.a", 4, 0.01, 0.007, 1.05045078, 1.10650487, 5.33619402},
    {"1.a", 4, 0.01, 0.008, 1.21657142, 1.27350263, 4.67964332},
    {"1.a", 4, 0.01, 0.009, 1.37245655, 1.42859627, 4.09045568},
    {"1.a", 4, 0.01, 0.010, 1.51749673, 1.57171551, 3.57290955},

    {"1.b", 4, kMu2Slow, 0.001, 0.10346160, 0.10967984, 6.01018450},
    {"1.b", 4, kMu2Slow, 0.002, 0.29814050, 0.32060606, 7.53522768},
    {"1.b", 4, kMu2Slow, 0.003, 0.53750740, 0.57628734, 7.21477436},
    {"1.b", 4, kMu2Slow, 0.004, 0.78870741, 0.83859945, 6.32579880},
    {"1.b", 4, kMu2Slow, 0.005, 1.03240021, 1.08777002, 5.36321218},
    {"1.b", 4, kMu2Slow, 0.006, 1.25904105, 1.31562088, 4.49388283},
    {"1.b", 4, kMu2Slow, 0.007, 1.46505497, 1.52011385, 3.75814410},
    {"1.b", 4, kMu2Slow, 0.008, 1.65010151, 1.70210131, 3.15130902},
    {"1.b", 4, kMu2Slow, 0.009, 1.81540668, 1.86361092, 2.65528566},
    {"1.b", 4, kMu2Slow, 0.010, 1.96283453, 2.00700331, 2.25025446},

    {"1.c", 5, 0.01, 0.001, 0.09793845, 0.10393609, 6.12389310},
    {"1.c", 5, 0.01, 0.002, 0.27607106, 0.29989579, 8.62992741},
    {"1.c", 5, 0.01, 0.003, 0.50864514, 0.55419819, 8.95576169},
    {"1.c", 5, 0.01, 0.004, 0.77068883, 0.83443491, 8.27131302},
    {"1.c", 5, 0.01, 0.005, 1.04195502, 1.11731297, 7.23236099},
    {"1.c", 5, 0.01, 0.006, 1.30831803, 1.38883665, 6.15436121},
    {"1.c", 5, 0.01, 0.007, 1.56119524, 1.64188994, 5.16877695},
    {"1.c", 5, 0.01, 0.008, 1.79617630, 1.87372614, 4.31749579},
    {"1.c", 5, 0.01, 0.009, 2.01163620, 2.08410558, 3.60250972},
    {"1.c", 5, 0.01, 0.010, 2.20764176, 2.27409559, 3.01017303},

    {"1.d", 5, kMu2Slow, 0.001, 0.15052080, 0.16214798, 7.72463209},
    {"1.d", 5, kMu2Slow, 0.002, 0.44663225, 0.48738023, 9.12338382},
    {"1.d", 5, kMu2Slow, 0.003, 0.80995181, 0.87613907, 8.17175362},
    {"1.d", 5, kMu2Slow, 0.004, 1.18338340, 1.26277196, 6.70860895},
    {"1.d", 5, kMu2Slow, 0.005, 1.53527328, 1.61736280, 5.34689961},
    {"1.d", 5, kMu2Slow, 0.006, 1.85242056, 1.93081123, 4.23179647},
    {"1.d", 5, kMu2Slow, 0.007, 2.13201057, 2.20360391, 3.35802017},
    {"1.d", 5, kMu2Slow, 0.008, 2.37611381, 2.43985641, 2.68264077},
    {"1.d", 5, kMu2Slow, 0.009, 2.58864894, 2.64458879, 2.16096717},
    {"1.d", 5, kMu2Slow, 0.010, 2.77390615, 2.82261385, 1.75592431},

    {"1.e", 6, 0.01, 0.001, 0.13018580, 0.13994358, 7.49526844},
    {"1.e", 6, 0.01, 0.002, 0.38029905, 0.41883309, 10.13256380},
    {"1.e", 6, 0.01, 0.003, 0.71209440, 0.78311783, 9.97387757},
    {"1.e", 6, 0.01, 0.004, 1.08482965, 1.17914296, 8.69383567},
    {"1.e", 6, 0.01, 0.005, 1.46496035, 1.56995792, 7.16726391},
    {"1.e", 6, 0.01, 0.006, 1.83015922, 1.93551924, 5.75687720},
    {"1.e", 6, 0.01, 0.007, 2.16831417, 2.26748158, 4.57347954},
    {"1.e", 6, 0.01, 0.008, 2.47457869, 2.56422251, 3.62258949},
    {"1.e", 6, 0.01, 0.009, 2.74850736, 2.82748357, 2.87342179},
    {"1.e", 6, 0.01, 0.010, 2.99197323, 3.06042246, 2.28776217},

    {"1.f", 6, kMu2Slow, 0.001, 0.20681137, 0.22608037, 9.31718650},
    {"1.f", 6, kMu2Slow, 0.002, 0.62839527, 0.69329368, 10.32764113},
    {"1.f", 6, kMu2Slow, 0.003, 1.14251792, 1.24085044, 8.60665053},
    {"1.f", 6, kMu2Slow, 0.004, 1.65787655, 1.76701584, 6.58307686},
    {"1.f", 6, kMu2Slow, 0.005, 2.12793843, 2.23247579, 4.91261212},
    {"1.f", 6, kMu2Slow, 0.006, 2.53767126, 2.63056168, 3.66045914},
    {"1.f", 6, kMu2Slow, 0.007, 2.88784045, 2.96720787, 2.74833134},
    {"1.f", 6, kMu2Slow, 0.008, 3.18525763, 3.25171044, 2.08626186},
    {"1.f", 6, kMu2Slow, 0.009, 3.43809333, 3.49318909, 1.60250898},
    {"1.f", 6, kMu2Slow, 0.010, 3.65399343, 3.69949483, 1.24525116},

    {"1.g", 7, 0.01, 0.001, 0.16711501, 0.18183576, 8.80875460},
    {"1.g", 7, 0.01, 0.002, 0.50408229, 0.56151276, 11.39307364},
    {"1.g", 7, 0.01, 0.003, 0.95693912, 1.05819964, 10.58170982},
    {"1.g", 7, 0.01, 0.004, 1.46217043, 1.58867062, 8.65153531},
    {"1.g", 7, 0.01, 0.005, 1.96736551, 2.09885671, 6.68361840},
    {"1.g", 7, 0.01, 0.006, 2.44010356, 2.56304970, 5.03856237},
    {"1.g", 7, 0.01, 0.007, 2.86557429, 2.97351291, 3.76673603},
    {"1.g", 7, 0.01, 0.008, 3.24038821, 3.33162878, 2.81572935},
    {"1.g", 7, 0.01, 0.009, 3.56716080, 3.64255966, 2.11369397},
    {"1.g", 7, 0.01, 0.010, 3.85102404, 3.91251645, 1.59678065},

    {"1.h", 7, kMu2Slow, 0.001, 0.27284496, 0.30228227, 10.78902581},
    {"1.h", 7, kMu2Slow, 0.002, 0.84595961, 0.94043547, 11.16789163},
    {"1.h", 7, kMu2Slow, 0.003, 1.53800360, 1.67035363, 8.60531312},
    {"1.h", 7, kMu2Slow, 0.004, 2.21148627, 2.34637907, 6.09964432},
    {"1.h", 7, kMu2Slow, 0.005, 2.80406596, 2.92305851, 4.24357205},
    {"1.h", 7, kMu2Slow, 0.006, 3.30291100, 3.40088073, 2.96616340},
    {"1.h", 7, kMu2Slow, 0.007, 3.71635507, 3.79441291, 2.10038698},
    {"1.h", 7, kMu2Slow, 0.008, 4.05853034, 4.11982682, 1.51031226},
    {"1.h", 7, kMu2Slow, 0.009, 4.34322475, 4.39112053, 1.10276991},
    {"1.h", 7, kMu2Slow, 0.010, 4.58205090, 4.61947983, 0.81685963},
}};

} // namespace busq
