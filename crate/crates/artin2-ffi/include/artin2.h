/* SPDX-License-Identifier: Apache-2.0 */

#ifndef ARTIN2_H
#define ARTIN2_H

/* Generated by cbindgen from artin2-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call in this ABI.
 */
typedef enum Artin2Status {
  ARTIN2_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  ARTIN2_STATUS_NULL_ARGUMENT = 1,
  /**
   * An argument failed to parse or was rejected by validation.
   */
  ARTIN2_STATUS_INVALID_INPUT = 2,
  /**
   * The pair is multiplicatively dependent; no density is defined here.
   */
  ARTIN2_STATUS_DEPENDENT_PAIR = 3,
  /**
   * The pair has torsion; the closed-form coefficient does not apply.
   */
  ARTIN2_STATUS_NOT_TORSIONFREE = 4,
  /**
   * A size or bound argument exceeded a documented cap.
   */
  ARTIN2_STATUS_OUT_OF_RANGE = 5,
  /**
   * The request names a case the library deliberately does not cover.
   */
  ARTIN2_STATUS_UNSUPPORTED = 6,
  /**
   * Arithmetic failure or internal panic; see the error message.
   */
  ARTIN2_STATUS_INTERNAL = 7,
} Artin2Status;

/**
 * Opaque handle to a membership count over a prime range. Produced by
 * [`artin2_count_range`], read through the `artin2_report_*` accessors,
 * released with [`artin2_report_free`].
 */
typedef struct Artin2Report Artin2Report;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *artin2_version(void);

/**
 * Message for the most recent failure on this thread; static lifetime
 * until the next failing call on the same thread, do not free.
 */
const char *artin2_last_error_message(void);

/**
 * Frees a string returned through an `out` parameter of this ABI.
 * Passing null is a no-op.
 *
 * # Safety
 * `s` must be null or a pointer previously returned by this library
 * through a `char **` out parameter, not yet freed.
 */
void artin2_string_free(char *s);

/**
 * Writes the universal constant S = prod_p (1 - p/(p^3-1)) rounded to
 * `digits` decimal digits (1..=250), e.g. "0.5759599689" for 10.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
enum Artin2Status artin2_s_digits(size_t digits, char **out);

/**
 * Writes the exact density coefficient c with density = c * S for a
 * torsion-free independent pair, as a fraction string like "9343/9520".
 *
 * # Safety
 * `a` and `b` must be null or NUL-terminated strings; `out` must be a
 * valid writable pointer.
 */
enum Artin2Status artin2_density_coefficient(const char *a, const char *b, char **out);

/**
 * Writes the torsion order of the pair: the order of the torsion part
 * of the group generated by `a` and `b` modulo sign. 1 means
 * torsion-free. Dependent pairs yield `DEPENDENT_PAIR`.
 *
 * # Safety
 * `a` and `b` must be null or NUL-terminated strings; `out` must be a
 * valid writable pointer.
 */
enum Artin2Status artin2_torsion_order(const char *a, const char *b, uint64_t *out);

/**
 * Counts primes p in [lo, hi] with b mod p in the subgroup generated by
 * a mod p. On `OK` the caller owns the report handle and must release
 * it with [`artin2_report_free`].
 *
 * # Safety
 * `a` and `b` must be null or NUL-terminated strings; `out` must be a
 * valid writable pointer.
 */
enum Artin2Status artin2_count_range(const char *a,
                                     const char *b,
                                     uint64_t lo,
                                     uint64_t hi,
                                     struct Artin2Report **out);

/**
 * Number of members counted in the range.
 *
 * # Safety
 * `report` must be null or a live handle from [`artin2_count_range`];
 * `out` must be a valid writable pointer.
 */
enum Artin2Status artin2_report_members(const struct Artin2Report *report, uint64_t *out);

/**
 * Number of primes with good reduction considered in the range.
 *
 * # Safety
 * As for [`artin2_report_members`].
 */
enum Artin2Status artin2_report_considered(const struct Artin2Report *report, uint64_t *out);

/**
 * Number of primes skipped for bad reduction.
 *
 * # Safety
 * As for [`artin2_report_members`].
 */
enum Artin2Status artin2_report_skipped(const struct Artin2Report *report, uint64_t *out);

/**
 * Members divided by primes considered (0 when none were considered).
 *
 * # Safety
 * As for [`artin2_report_members`].
 */
enum Artin2Status artin2_report_observed_ratio(const struct Artin2Report *report, double *out);

/**
 * Observed ratio divided by the universal constant S.
 *
 * # Safety
 * As for [`artin2_report_members`].
 */
enum Artin2Status artin2_report_ratio_over_s(const struct Artin2Report *report, double *out);

/**
 * Writes the full report as a JSON document (same shape as the CLI
 * `count` result). Free the string with [`artin2_string_free`].
 *
 * # Safety
 * As for [`artin2_report_members`], with `out` a valid writable pointer.
 */
enum Artin2Status artin2_report_json(const struct Artin2Report *report, char **out);

/**
 * Releases a report handle. Passing null is a no-op.
 *
 * # Safety
 * `report` must be null or a handle from [`artin2_count_range`] not yet
 * freed.
 */
void artin2_report_free(struct Artin2Report *report);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ARTIN2_H */
