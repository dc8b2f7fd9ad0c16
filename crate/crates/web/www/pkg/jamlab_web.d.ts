/* tslint:disable */
/* eslint-disable */

export class Histogram {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly density_h0: Float64Array;
    readonly density_h1: Float64Array;
    readonly ks_h0: number;
    readonly ks_h1: number;
    readonly lambda_saa: number;
    readonly pdf_h0: Float64Array;
    readonly pdf_h1: Float64Array;
    readonly t: Float64Array;
}

export class Spectrum {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly a_max: number;
    readonly a_min: number;
    /**
     * `|S̃[n]|` of the jammer alone.
     */
    readonly interference: Float64Array;
    /**
     * `|R̃[n]|` of the noise-free received symbol.
     */
    readonly magnitude: Float64Array;
    readonly peak: number;
    readonly symbol: number;
}

export function pmd_curve(jammer: string, snr_db: number, njr_db: number, p_fa_saa: number, l_max: number): Float64Array;

export function statistic_histogram(l: number, snr_db: number, njr_db: number, rho: number, trials: number, seed: number): Histogram;

/**
 * Which analytic form the detector theory uses for a single tone at `njr_db`.
 */
export function tone_model(njr_db: number): string;

export function tone_spectrum(sf: number, freqs: Float64Array, sigma_j_sq: number, symbol: number): Spectrum;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_histogram_free: (a: number, b: number) => void;
    readonly __wbg_spectrum_free: (a: number, b: number) => void;
    readonly histogram_density_h0: (a: number) => [number, number];
    readonly histogram_density_h1: (a: number) => [number, number];
    readonly histogram_ks_h0: (a: number) => number;
    readonly histogram_ks_h1: (a: number) => number;
    readonly histogram_lambda_saa: (a: number) => number;
    readonly histogram_pdf_h0: (a: number) => [number, number];
    readonly histogram_pdf_h1: (a: number) => [number, number];
    readonly histogram_t: (a: number) => [number, number];
    readonly pmd_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly spectrum_a_max: (a: number) => number;
    readonly spectrum_a_min: (a: number) => number;
    readonly spectrum_interference: (a: number) => [number, number];
    readonly spectrum_magnitude: (a: number) => [number, number];
    readonly spectrum_peak: (a: number) => number;
    readonly spectrum_symbol: (a: number) => number;
    readonly statistic_histogram: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly tone_model: (a: number) => [number, number];
    readonly tone_spectrum: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
