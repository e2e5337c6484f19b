#ifndef PNDP_H
#define PNDP_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `Ok` is zero; everything else is an error.
 */
typedef enum {
  PNDP_STATUS_OK = 0,
  PNDP_STATUS_NULL_POINTER = 1,
  PNDP_STATUS_INVALID_UTF8 = 2,
  PNDP_STATUS_PARSE_ERROR = 3,
  PNDP_STATUS_DOMAIN_ERROR = 4,
  PNDP_STATUS_UNBOUND_SYMBOL = 5,
  PNDP_STATUS_UNKNOWN_EXAMPLE = 6,
  PNDP_STATUS_INVALID_MANIFEST = 7,
  PNDP_STATUS_PANIC = 8,
} PndpStatus;

/**
 * A symbolic expression.
 */
typedef struct PndpExpr PndpExpr;

/**
 * The report of one manifest run.
 */
typedef struct PndpReport PndpReport;

/**
 * Overrides for a run. A null pointer means "use the manifest's values".
 */
typedef struct {
  bool has_seed;
  uint64_t seed;
  /**
   * Zero keeps the manifest's sample count.
   */
  size_t samples;
  /**
   * Non-positive keeps the manifest's residual tolerance.
   */
  double tol;
} PndpRunOptions;

/**
 * Message of the last error on this thread; empty when none occurred.
 * Valid until the next failing call on the same thread.
 */
const char *pndp_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void pndp_string_free(char *s);

/**
 * Parses prefix text such as `(* 2 (sin x))`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
PndpStatus pndp_expr_parse(const char *text, PndpExpr **out);

/**
 * # Safety
 * `expr` must be null or a handle from this library, not yet freed.
 */
void pndp_expr_free(PndpExpr *expr);

/**
 * Prefix text of `expr`, or null when `expr` is null.
 *
 * # Safety
 * `expr` must be null or a live handle.
 */
char *pndp_expr_to_string(const PndpExpr *expr);

/**
 * # Safety
 * `expr` must be a live handle, `symbol` a NUL-terminated string and
 * `out` a valid pointer.
 */
PndpStatus pndp_expr_differentiate(const PndpExpr *expr, const char *symbol, PndpExpr **out);

/**
 * # Safety
 * `expr` must be a live handle and `out` a valid pointer.
 */
PndpStatus pndp_expr_simplify(const PndpExpr *expr, PndpExpr **out);

/**
 * Evaluates `expr` with `names[i] = values[i]` for `i < len`.
 *
 * # Safety
 * `names` and `values` must point to `len` elements (either may be null
 * when `len` is zero) and `out` must be valid.
 */
PndpStatus pndp_expr_evaluate(const PndpExpr *expr,
                              const char *const *names,
                              const double *values,
                              size_t len,
                              double *out);

/**
 * Newline-separated catalog ids.
 */
char *pndp_catalog_list(void);

/**
 * TOML source of a catalog entry.
 *
 * # Safety
 * `id` must be a NUL-terminated string and `out` a valid pointer.
 */
PndpStatus pndp_catalog_export(const char *id, char **out);

/**
 * Runs a catalog entry.
 *
 * # Safety
 * `id` must be a NUL-terminated string, `opts` null or valid, and `out` a
 * valid pointer.
 */
PndpStatus pndp_run_catalog(const char *id, const PndpRunOptions *opts, PndpReport **out);

/**
 * Runs a manifest given as TOML text.
 *
 * # Safety
 * `text` must be a NUL-terminated string, `opts` null or valid, and `out`
 * a valid pointer.
 */
PndpStatus pndp_run_manifest(const char *text, const PndpRunOptions *opts, PndpReport **out);

/**
 * Exit status of a report: 0 iff every check passed, -1 for null.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
int32_t pndp_report_status(const PndpReport *report);

/**
 * JSON rendering of a report, or null when `report` is null.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
char *pndp_report_json(const PndpReport *report);

/**
 * # Safety
 * `report` must be null or a handle from this library, not yet freed.
 */
void pndp_report_free(PndpReport *report);

#endif  /* PNDP_H */
