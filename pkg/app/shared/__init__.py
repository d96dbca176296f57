# 공유 모듈 초기화