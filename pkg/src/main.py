import sys
import os


def main(argv=None):
    import time
    start_time = time.time()
    # Add src to path to allow imports - ensure it's at the beginning to override any other paths
    current_dir = os.path.dirname(os.path.abspath(__file__))
    if current_dir not in sys.path:
        sys.path.insert(0, current_dir)

    # Imports moved inside main to avoid E402 (imports not at top)
    # caused by sys.path manipulation above
    from core.logger import setup_logging, get_main_logger
    from cli.commands import build_parser, resolve_log_level, run_command
    from cli.error_handler import EXIT_OK, handle_cli_error

    args = build_parser().parse_args(argv)

    # Setup Logging
    setup_logging(resolve_log_level(args), log_to_file=args.log_file)
    logger = get_main_logger()
    logger.info(f"Starting {args.command}...")

    try:
        from core.paths import PROJECT_ROOT
        logger.debug(f"Project Root: {PROJECT_ROOT}")
        run_command(args)
    except KeyboardInterrupt:
        logger.info("Run interrupted by user")
        return 130
    except Exception as e:
        message, code = handle_cli_error(e, args.command)
        logger.debug(f"{args.command} failed", exc_info=True)
        print(message, file=sys.stderr)
        return code

    logger.debug(f"Total wall time: {time.time() - start_time:.2f}s")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
