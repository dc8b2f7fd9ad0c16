/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_histogram_free: (a: number, b: number) => void;
export const __wbg_spectrum_free: (a: number, b: number) => void;
export const histogram_density_h0: (a: number) => [number, number];
export const histogram_density_h1: (a: number) => [number, number];
export const histogram_ks_h0: (a: number) => number;
export const histogram_ks_h1: (a: number) => number;
export const histogram_lambda_saa: (a: number) => number;
export const histogram_pdf_h0: (a: number) => [number, number];
export const histogram_pdf_h1: (a: number) => [number, number];
export const histogram_t: (a: number) => [number, number];
export const pmd_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const spectrum_a_max: (a: number) => number;
export const spectrum_a_min: (a: number) => number;
export const spectrum_interference: (a: number) => [number, number];
export const spectrum_magnitude: (a: number) => [number, number];
export const spectrum_peak: (a: number) => number;
export const spectrum_symbol: (a: number) => number;
export const statistic_histogram: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const tone_model: (a: number) => [number, number];
export const tone_spectrum: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
