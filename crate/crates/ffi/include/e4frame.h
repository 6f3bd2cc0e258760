#ifndef E4FRAME_H
#define E4FRAME_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call. Values from `E4F_STATUS_DOMAIN` on mirror
 the library's error kinds one to one.
 */
typedef enum E4fStatus {
  E4F_STATUS_OK = 0,
  E4F_STATUS_NULL_ARGUMENT = 1,
  E4F_STATUS_INVALID_UTF8 = 2,
  E4F_STATUS_INDEX_OUT_OF_RANGE = 3,
  E4F_STATUS_PANIC = 4,
  E4F_STATUS_DOMAIN = 10,
  E4F_STATUS_SYNTAX = 11,
  E4F_STATUS_ARITY = 12,
  E4F_STATUS_DOMAIN_PROBE = 13,
  E4F_STATUS_UNKNOWN_CURVE = 14,
  E4F_STATUS_STATIONARY_POINT = 15,
  E4F_STATUS_DEGENERATE_FRAME = 16,
  E4F_STATUS_MISMATCHED_SERIES = 17,
  E4F_STATUS_NOT_UNIT = 18,
  E4F_STATUS_HINT_MISMATCH = 19,
  E4F_STATUS_ZERO_STEP = 20,
  E4F_STATUS_PROFILE_DOMAIN = 21,
  E4F_STATUS_TANGENT_MISMATCH = 22,
  E4F_STATUS_NOT_ROTATION = 23,
  E4F_STATUS_TOO_FEW_SAMPLES = 24,
  E4F_STATUS_DEGENERATE_GEOMETRY = 25,
  E4F_STATUS_PARSE = 26,
  E4F_STATUS_NON_MONOTONE_PARAM = 27,
  E4F_STATUS_INVALID_CONFIG = 28,
  E4F_STATUS_IO = 29,
} E4fStatus;

/*
 Parallel-transport integrator.
 */
typedef enum E4fMethod {
  E4F_METHOD_RK4 = 0,
  E4F_METHOD_DOUBLE_REFLECTION = 1,
} E4fMethod;

/*
 Frames, curvatures and Euler angles of one sampled curve.
 */
typedef struct E4fAnalysis E4fAnalysis;

/*
 A curve given by expressions or by sampled points.
 */
typedef struct E4fCurve E4fCurve;

/*
 Orthonormal frame at one sample. Rows are T, M1, M2, M3 for a transported
 frame and T, N, B1, B2 for a Frenet frame.
 */
typedef struct E4fFrame {
  double s;
  double vectors[4][4];
} E4fFrame;

/*
 Curvatures at one sample. `tau` and `sigma` are NaN where the Frenet
 construction stops early.
 */
typedef struct E4fCurvatures {
  double s;
  double k1;
  double k2;
  double k3;
  double kappa;
  double tau;
  double sigma;
} E4fCurvatures;

/*
 Euler angles of the Frenet frame relative to the transported frame.
 Angles are NaN where the Frenet frame does not exist.
 */
typedef struct E4fEuler {
  double s;
  double theta;
  double phi;
  double psi;
  bool gimbal;
} E4fEuler;

/*
 Verdicts and sphere data. Fields that were not computed are NaN.
 */
typedef struct E4fClassification {
  bool spherical;
  bool normal;
  bool rectifying;
  bool osculating;
  double sphere_center[4];
  double sphere_radius;
  double radius_identity_gap;
  double anchor_constancy;
} E4fClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the most recent failure on this thread, or an empty
 string. The pointer stays valid until the next failing call on this thread.
 */
const char *e4f_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *e4f_version(void);

/*
 Curve from four comma-separated coordinate expressions in `s` on
 `[t_min, t_max]`.

 # Safety
 `coords` must be a NUL-terminated string and `out` a writable pointer.
 */
enum E4fStatus e4f_curve_from_expr(const char *coords,
                                   double t_min,
                                   double t_max,
                                   struct E4fCurve **out);

/*
 One of the catalog curves (example1, example2, circle, line, helix3) on
 its default range.

 # Safety
 `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum E4fStatus e4f_curve_from_builtin(const char *name, struct E4fCurve **out);

/*
 Curve from `n` samples: parameters `t[0..n]` strictly increasing and
 points `xyzw[0..4n]` stored row by row.

 # Safety
 `t` must point to `n` doubles, `xyzw` to `4 * n` doubles.
 */
enum E4fStatus e4f_curve_from_samples(const double *t,
                                      const double *xyzw,
                                      size_t n,
                                      struct E4fCurve **out);

/*
 # Safety
 `curve` must come from an `e4f_curve_from_*` call and not be used afterwards.
 */
void e4f_curve_free(struct E4fCurve *curve);

/*
 Sample `curve` and compute both frames and all curvatures. `samples` is
 the grid size for expression curves and ignored for sampled curves.

 # Safety
 `curve` must be a live handle and `out` a writable pointer.
 */
enum E4fStatus e4f_analyze(const struct E4fCurve *curve,
                           size_t samples,
                           enum E4fMethod method,
                           struct E4fAnalysis **out);

/*
 # Safety
 `analysis` must come from `e4f_analyze` and not be used afterwards.
 */
void e4f_analysis_free(struct E4fAnalysis *analysis);

/*
 Number of samples, or 0 for a null handle.

 # Safety
 `analysis` must be null or a live handle.
 */
size_t e4f_analysis_len(const struct E4fAnalysis *analysis);

/*
 Parallel-transport frame at sample `j`.

 # Safety
 `analysis` must be a live handle and `out` a writable pointer.
 */
enum E4fStatus e4f_analysis_frame(const struct E4fAnalysis *analysis,
                                  size_t j,
                                  struct E4fFrame *out);

/*
 Frenet frame at sample `j`; `E4F_STATUS_DEGENERATE_FRAME` where it does not exist.

 # Safety
 `analysis` must be a live handle and `out` a writable pointer.
 */
enum E4fStatus e4f_analysis_frenet_frame(const struct E4fAnalysis *analysis,
                                         size_t j,
                                         struct E4fFrame *out);

/*
 Curvatures at sample `j`.

 # Safety
 `analysis` must be a live handle and `out` a writable pointer.
 */
enum E4fStatus e4f_analysis_curvatures(const struct E4fAnalysis *analysis,
                                       size_t j,
                                       struct E4fCurvatures *out);

/*
 Euler angles at sample `j`. The first call computes all samples.

 # Safety
 `analysis` must be a live handle and `out` a writable pointer.
 */
enum E4fStatus e4f_analysis_euler(const struct E4fAnalysis *analysis,
                                  size_t j,
                                  struct E4fEuler *out);

/*
 Spherical, normal, rectifying and osculating verdicts at tolerance `tol`.

 # Safety
 `analysis` must be a live handle and `out` a writable pointer.
 */
enum E4fStatus e4f_analysis_classify(const struct E4fAnalysis *analysis,
                                     double tol,
                                     struct E4fClassification *out);

/*
 Full classification report as a JSON document. Release it with
 `e4f_string_free`.

 # Safety
 `analysis` must be a live handle and `out` a writable pointer.
 */
enum E4fStatus e4f_analysis_report_json(const struct E4fAnalysis *analysis, double tol, char **out);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void e4f_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* E4FRAME_H */
